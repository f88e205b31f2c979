#pragma once

#include "fracexp/expr.hpp"
#include "fracexp/functional.hpp"
#include "fracexp/hurst.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fracexp {

/// Per-order contributions and partial sums of a series evaluated on one path.
struct SeriesResult {
    int order = 0;
    std::vector<double> terms;
    std::vector<double> partial_sums;
    std::vector<double> diagnostics;
    std::string diagnostics_label;

    double value() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
    void push(double term);
};

/// I_r: 1 for r in [0, t_1], i for r in (t_{i-1}, t_i].
int locate_segment(double r, const TimeGrid& grid);

/// psi_k^{(r, t_j)}; requires t_{j-1} <= r <= t_j.
struct PsiSpec {
    double r;
    int j;
    int k;
};

/// 2^{-k} sum_{|q|=k} prod_i bracket_i^{q_i}/q_i! D^q F with
/// bracket_i = |t_j - t_{i-1}|^{2H} - |t_j - t_i|^{2H} + |t_i - r|^{2H} - |r - t_{i-1}|^{2H}.
Expr psi(const Expr& F, const PsiSpec& spec, const TimeGrid& grid, HurstParam H);

/// Symbolic terms l = 0..order of the backward Taylor expansion of E~[F | F_r].
/// Each term is an expression in the grid samples and B(r).
std::vector<Expr> backward_taylor_terms(const Expr& F, double r, const TimeGrid& grid, int order, HurstParam H);

/// Evaluate symbolic series terms on a path (which must contain r and the grid times).
SeriesResult evaluate_series(const std::vector<Expr>& terms, const PathView& path, const Bindings& b = {});

SeriesResult backward_taylor(const Expr& F, double r, const TimeGrid& grid, int order, HurstParam H,
                             const PathView& path);

/// Number of (q, i) index pairs contributing at order l.
long taylor_term_count(double r, const TimeGrid& grid, int l);

/// Returns ||sup_{|w| = m} |D^w F| ||_{L^2} for a total derivative order m.
using SupEstimator = std::function<double(int m)>;

/// Heuristic Monte-Carlo estimate: max over multi-indices per path, then RMS over paths.
SupEstimator mc_sup_estimator(const Expr& F, const TimeGrid& grid, HurstParam H, long n_paths = 1000,
                              unsigned long long seed = 42);

/// Bound sequence of the convergence condition for N = 1..N_max.
std::vector<double> assumption_a_sequence(const Expr& F, double r, const TimeGrid& grid, HurstParam H, int N_max,
                                          const SupEstimator& sup);

/// Cramer-type bound on the truncation error of the expansion of exp(sigma B_T)
/// on a single-time grid after order N, given B_T and B_r on the path.
double exp_sample_tail_bound(double sigma, double r, double T, HurstParam H, double BT, double Br, int N);

}  // namespace fracexp
