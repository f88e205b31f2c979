#pragma once

#include <cstdint>
#include <vector>

namespace fracexp {

// Hermite polynomials use the probabilists' convention throughout:
// h_n(x) = (-1)^n e^{x^2/2} d^n/dx^n e^{-x^2/2}, h_0 = 1, h_1 = x,
// h_n = x h_{n-1} - (n-1) h_{n-2}.

/// Coefficient rows of h_0..h_max_degree (ascending powers of x).
class HermiteTable {
public:
    explicit HermiteTable(int max_degree);

    int max_degree() const noexcept { return static_cast<int>(rows_.size()) - 1; }
    const std::vector<double>& row(int n) const { return rows_.at(static_cast<std::size_t>(n)); }
    double eval(int n, double x) const;

private:
    std::vector<std::vector<double>> rows_;
};

double hermite_eval(int n, double x);

/// var^{n/2} h_n(x / sqrt(var)); polynomial in (x, var), so var = 0 gives x^n.
double scaled_hermite(int n, double x, double var);

/// |exp(tx - t^2/2) - sum_{n<=N} t^n/n! h_n(x)|.
double hermite_generating_check(double t, double x, int N);

/// |sum_k C(l,k) x^k h_{l-k}(y) - h_l(x+y)|.
double hermite_shift_identity_gap(int l, double x, double y);

/// Exact Stirling numbers of the second kind {j, k}; throws OverflowError past uint64.
class StirlingTable {
public:
    explicit StirlingTable(int max_j);

    int max_j() const noexcept { return static_cast<int>(b_.size()) - 1; }
    /// Throws OverflowError if the entry did not fit.
    std::uint64_t at(int j, int k) const;
    bool fits(int j, int k) const;

private:
    std::vector<std::vector<std::uint64_t>> b_;
    std::vector<std::vector<bool>> ok_;
};

std::uint64_t stirling2(int j, int k);

/// sum_{l=0}^p p!/(p-l)! {2n, l}; equals p^{2n}.
std::uint64_t stirling_falling_sum(int p, int n);

/// Floating-point Stirling rows {j, 0..j} for j <= max_j (no overflow below j ~ 200).
std::vector<std::vector<double>> stirling2_table_real(int max_j);

double beta_fn(double x, double y);

double factorial(int n);
double binomial(int n, int k);

/// All compositions of `total` into `parts` nonnegative integers, lexicographic.
std::vector<std::vector<int>> compositions(int total, int parts);

}  // namespace fracexp
