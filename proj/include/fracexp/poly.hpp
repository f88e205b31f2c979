#pragma once

#include <span>
#include <string>
#include <vector>

namespace fracexp {

/// Dense polynomial in one variable, coefficients in ascending degree.
class Poly {
public:
    Poly() = default;
    Poly(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }
    explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly constant(double c) { return Poly({c}); }
    /// a + b x
    static Poly linear(double a, double b) { return Poly({a, b}); }

    int degree() const noexcept { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }
    std::span<const double> coeffs() const noexcept { return c_; }
    double coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0.0; }

    double operator()(double x) const noexcept;

    Poly derivative() const;
    /// Coefficients of p(c + y) as a polynomial in y.
    Poly shifted(double c) const;

    Poly& operator+=(const Poly& o);
    Poly& operator*=(double s);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator*(Poly a, double s) { return a *= s; }
    friend Poly operator*(double s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b) = default;

private:
    void trim();
    std::vector<double> c_;
};

/// Piecewise polynomial supported on [breakpoints.front(), breakpoints.back()],
/// zero outside. Piece k lives on [x_k, x_{k+1}); values at interior
/// breakpoints follow the right piece, the last breakpoint the last piece.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(std::vector<double> breakpoints, std::vector<Poly> pieces);

    /// p on [lo, hi], zero elsewhere.
    static PiecewisePoly on(double lo, double hi, Poly p);
    /// Indicator of [lo, hi].
    static PiecewisePoly indicator(double lo, double hi) { return on(lo, hi, Poly::constant(1.0)); }

    bool empty() const noexcept { return pieces_.empty(); }
    std::span<const double> breakpoints() const noexcept { return x_; }
    std::span<const Poly> pieces() const noexcept { return pieces_; }
    std::size_t num_pieces() const noexcept { return pieces_.size(); }
    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }

    double operator()(double u) const noexcept;

    /// Restriction to [lo, hi] (intersected with the support).
    PiecewisePoly restricted(double lo, double hi) const;
    /// Merge adjacent equal pieces and drop zero pieces at the ends.
    PiecewisePoly simplified() const;

    friend PiecewisePoly operator+(const PiecewisePoly& a, const PiecewisePoly& b);
    friend PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b);
    friend PiecewisePoly operator*(double s, PiecewisePoly a);
    friend bool operator==(const PiecewisePoly& a, const PiecewisePoly& b) = default;

    std::string to_string() const;

private:
    std::vector<double> x_;
    std::vector<Poly> pieces_;
};

}  // namespace fracexp
