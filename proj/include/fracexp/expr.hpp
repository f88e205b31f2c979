#pragma once

#include "fracexp/poly.hpp"

#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace fracexp {

/// max(base, vars...) where vars are free-variable names.
struct TimeRef {
    double base = 0.0;
    std::vector<std::string> vars;  // sorted, unique

    bool is_numeric() const noexcept { return vars.empty(); }
    TimeRef with(const std::string& var) const;
    TimeRef with(double t) const;
    friend bool operator==(const TimeRef&, const TimeRef&) = default;
};

class Expr;

namespace node {

struct Const { double value; };
/// B(t)
struct Sample { double t; };
/// int_a^b f(s) dB_s
struct WienerInt { PiecewisePoly f; double a, b; };
/// int_lo^hi B_s^power ds with power 1 or 2; when `frozen` is finite the path is
/// stopped there, i.e. B_s is replaced by B_{min(s, frozen)}.
struct TimeInt {
    TimeRef lo;
    double hi;
    int power;
    double frozen = std::numeric_limits<double>::infinity();
};
struct FreeVar { std::string name; };
/// (b - max(args))^+
struct Ramp { double b; TimeRef args; };
/// f(var); indicators are the constant-one case
struct PolyAt { PiecewisePoly f; std::string var; };
struct Sum { std::vector<Expr> terms; };
struct Product { std::vector<Expr> factors; };
struct Power { std::vector<Expr> base; int n; };  // base holds exactly one element
struct Exp { std::vector<Expr> arg; };
/// var^{n/2} h_n(arg / sqrt(var))
struct Hermite { int n; std::vector<Expr> arg; double var; };
/// (1/2)(int_0^T + int_0^r) body(u) phi_H(u, v) du, a function of v.
/// Once v is bound, `v_value` holds it and the body no longer mentions v.
struct KernelInt {
    std::vector<Expr> body;
    std::string u, v;
    double T, r, h;
    double v_value = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace node

using NodeVariant = std::variant<node::Const, node::Sample, node::WienerInt, node::TimeInt, node::FreeVar,
                                 node::Ramp, node::PolyAt, node::Sum, node::Product, node::Power, node::Exp,
                                 node::Hermite, node::KernelInt>;

/// Immutable expression tree over fBm primitives. Copies share structure.
class Expr {
public:
    Expr();  // Const 0
    Expr(double c);  // NOLINT: implicit constant

    const NodeVariant& node() const noexcept { return n_->v; }
    /// Canonical S-expression text; equal keys mean structurally equal trees.
    const std::string& key() const noexcept { return n_->key; }

    template <class T>
    const T* as() const noexcept { return std::get_if<T>(&n_->v); }
    bool is_const() const noexcept { return as<node::Const>() != nullptr; }
    bool is_const(double c) const noexcept {
        auto p = as<node::Const>();
        return p && p->value == c;
    }
    double const_value() const;

    static Expr make(NodeVariant v);

private:
    struct Node {
        NodeVariant v;
        std::string key;
    };
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

// Builders. They flatten nested sums/products, fold constants, merge repeated
// factors into powers and like terms into scaled terms.
Expr constant(double c);
Expr sample(double t);
Expr wiener_int(PiecewisePoly f, double a, double b);
Expr time_int(double a, double b);
Expr time_int_sq(double a, double b);
Expr time_int(TimeRef lo, double hi, int power, double frozen = std::numeric_limits<double>::infinity());
Expr free_var(const std::string& name);
Expr ramp(double b, TimeRef args);
Expr poly_at(PiecewisePoly f, const std::string& var);
Expr indicator(double lo, double hi, const std::string& var);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr power(const Expr& base, int n);
Expr exp(const Expr& arg);
Expr hermite(int n, const Expr& arg, double var);
Expr kernel_int(const Expr& body, const std::string& u, const std::string& v, double T, double r, double h);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);

/// Canonical S-expression form, e.g. "(* (^ (B 0.5) 2) (B 1))".
std::string to_sexpr(const Expr& e);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

/// Names of free variables appearing in e.
std::vector<std::string> free_vars(const Expr& e);

/// All sample times referenced by Sample nodes.
std::vector<double> sample_times(const Expr& e);

/// Numeric times appearing anywhere in e (samples, limits, breakpoints).
std::vector<double> time_labels(const Expr& e);

/// Number of nodes (shared subtrees counted each time).
std::size_t tree_size(const Expr& e);

/// True if e contains no random primitive (samples, integrals).
bool is_deterministic(const Expr& e);

/// Substitute numeric values for free variables.
Expr bind(const Expr& e, const std::string& var, double value);

}  // namespace fracexp
