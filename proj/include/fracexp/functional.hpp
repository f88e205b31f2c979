#pragma once

#include "fracexp/expr.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fracexp {

/// 0 = t_0 < t_1 < ... < t_J = T.
class TimeGrid {
public:
    /// `times` may omit the leading 0.
    explicit TimeGrid(std::vector<double> times);

    int J() const noexcept { return static_cast<int>(t_.size()) - 1; }
    double T() const noexcept { return t_.back(); }
    /// t_i for i = 0..J
    double t(int i) const { return t_.at(static_cast<std::size_t>(i)); }
    std::span<const double> times() const noexcept { return t_; }
    /// Index i with t_i == x (relative tolerance 1e-12), or -1.
    int index_of(double x) const noexcept;

private:
    std::vector<double> t_;
};

/// One sampled path: values of B at ascending times starting at 0.
struct PathView {
    std::span<const double> times;
    std::span<const double> values;

    /// B at a path time; throws EvalError off the grid.
    double at(double t) const;
    /// Linear interpolation of the path; throws EvalError beyond the last time.
    double interp(double t) const;
};

class Bindings {
public:
    Bindings() = default;
    Bindings(std::initializer_list<std::pair<std::string, double>> init);
    void set(const std::string& name, double value);
    const double* find(const std::string& name) const noexcept;
    double get(const std::string& name) const;
    std::span<const std::pair<std::string, double>> entries() const noexcept { return v_; }

private:
    std::vector<std::pair<std::string, double>> v_;
};

/// Numeric value of e. Time integrals use the trapezoid rule on the path's grid.
double eval(const Expr& e, const Bindings& b = {}, const PathView* path = nullptr);
double eval(const Expr& e, const Bindings& b, const PathView& path);

/// e as a piecewise polynomial in `var` on [lo, hi], other variables taken from b
/// and random parts evaluated on path. nullopt if e is not piecewise polynomial
/// in var (e.g. var enters an exponential or a path integral limit).
std::optional<PiecewisePoly> to_piecewise(const Expr& e, const std::string& var, double lo, double hi,
                                          const Bindings& b = {}, const PathView* path = nullptr);

/// Fractional Malliavin derivative D_var e with a symbolic argument.
Expr malliavin(const Expr& e, const std::string& var);
/// Same with a numeric argument t, i.e. the directional derivative along chi_[0,t].
Expr malliavin_at(const Expr& e, double t);

/// Frozen-path operator: the driving path is stopped at r.
Expr freeze(const Expr& e, double r);

/// True if e is built from samples at `times` (or 0), constants, sums,
/// products, powers, exp and Hermite nodes only.
bool is_discrete(const Expr& e, std::span<const double> times);

/// D_{t_1}^{q_1} ... D_{t_J}^{q_J} e with D_{t_i} = sum_{m >= i} d/dx_m
/// (derivative along chi_[0,t_i]). Throws DomainError for non-discrete e.
Expr grid_partials(const Expr& e, const TimeGrid& grid, const std::vector<int>& q);

/// Same without the discreteness check.
Expr directional_partials(const Expr& e, const TimeGrid& grid, const std::vector<int>& q);

}  // namespace fracexp
