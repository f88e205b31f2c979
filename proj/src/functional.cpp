#include "fracexp/functional.hpp"

#include "fracexp/errors.hpp"
#include "fracexp/kernel.hpp"
#include "fracexp/quadrature.hpp"
#include "fracexp/special.hpp"

#include <algorithm>
#include <cmath>

namespace fracexp {

namespace {

bool same_time(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); }

}  // namespace

TimeGrid::TimeGrid(std::vector<double> times) : t_(std::move(times)) {
    if (t_.empty() || t_.front() != 0.0) t_.insert(t_.begin(), 0.0);
    if (t_.size() < 2) throw DomainError("time grid needs at least one positive time");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1]) || !std::isfinite(t_[i]))
            throw DomainError("time grid must be strictly ascending from 0");
}

int TimeGrid::index_of(double x) const noexcept {
    for (std::size_t i = 0; i < t_.size(); ++i)
        if (same_time(x, t_[i])) return static_cast<int>(i);
    return -1;
}

double PathView::at(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it != times.end() && same_time(*it, t)) return values[static_cast<std::size_t>(it - times.begin())];
    if (it != times.begin() && same_time(*(it - 1), t))
        return values[static_cast<std::size_t>(it - times.begin()) - 1];
    throw EvalError("sample time " + format_double(t) + " is not on the path grid");
}

double PathView::interp(double t) const {
    if (t < 0.0 || t > times.back() * (1.0 + 1e-12))
        throw EvalError("time " + format_double(t) + " is beyond the simulated path");
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
    const double w = (t - times[k]) / (times[k + 1] - times[k]);
    return (1.0 - w) * values[k] + w * values[k + 1];
}

Bindings::Bindings(std::initializer_list<std::pair<std::string, double>> init) : v_(init) {}

void Bindings::set(const std::string& name, double value) {
    for (auto& [n, v] : v_)
        if (n == name) {
            v = value;
            return;
        }
    v_.emplace_back(name, value);
}

const double* Bindings::find(const std::string& name) const noexcept {
    for (const auto& [n, v] : v_)
        if (n == name) return &v;
    return nullptr;
}

double Bindings::get(const std::string& name) const {
    if (auto p = find(name)) return *p;
    throw EvalError("unbound variable " + name);
}

namespace {

double resolve(const TimeRef& t, const Bindings& b) {
    double m = t.base;
    for (const auto& v : t.vars) m = std::max(m, b.get(v));
    return m;
}

const PathView& need(const PathView* p) {
    if (!p) throw EvalError("expression needs a path but none was supplied");
    return *p;
}

// trapezoid integral of B^p over [lo, hi] on the path grid
double trapezoid(const PathView& path, double lo, double hi, int p) {
    if (!(hi > lo)) return 0.0;
    auto f = [p](double x) { return p == 1 ? x : x * x; };
    const auto& ts = path.times;
    auto it = std::upper_bound(ts.begin(), ts.end(), lo);
    double x0 = lo, y0 = f(path.interp(lo)), acc = 0.0;
    for (; it != ts.end() && *it < hi; ++it) {
        const double y1 = f(path.values[static_cast<std::size_t>(it - ts.begin())]);
        acc += 0.5 * (*it - x0) * (y0 + y1);
        x0 = *it;
        y0 = y1;
    }
    acc += 0.5 * (hi - x0) * (y0 + f(path.interp(hi)));
    return acc;
}

double wiener_sum(const PathView& path, const PiecewisePoly& f, double a, double b) {
    if (!(b > a)) return 0.0;
    const auto& ts = path.times;
    std::vector<double> pts{a};
    for (double t : ts)
        if (t > a && t < b) pts.push_back(t);
    for (double x : f.breakpoints())
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        if (!(pts[k + 1] > pts[k])) continue;
        acc += f(0.5 * (pts[k] + pts[k + 1])) * (path.interp(pts[k + 1]) - path.interp(pts[k]));
    }
    return acc;
}

Expr rebuild(const node::KernelInt& n, const Expr& body) {
    if (body.is_const(0.0)) return constant(0.0);
    auto k = n;
    k.body = {body};
    return Expr::make(std::move(k));
}

double kernel_int_value(const node::KernelInt& n, const Bindings& b, const PathView* path);

struct Evaluator {
    const Bindings& b;
    const PathView* path;

    double operator()(const Expr& e) const { return std::visit(*this, e.node()); }

    double operator()(const node::Const& n) const { return n.value; }
    double operator()(const node::Sample& n) const { return need(path).at(n.t); }
    double operator()(const node::WienerInt& n) const { return wiener_sum(need(path), n.f, n.a, n.b); }
    double operator()(const node::TimeInt& n) const {
        const double lo = resolve(n.lo, b);
        if (!(lo < n.hi)) return 0.0;
        const auto& p = need(path);
        if (!std::isfinite(n.frozen) || n.frozen >= n.hi) return trapezoid(p, lo, n.hi, n.power);
        const double r = n.frozen;
        double acc = trapezoid(p, lo, r, n.power);
        const double br = p.interp(r);
        acc += (n.power == 1 ? br : br * br) * (n.hi - std::max(lo, r));
        return acc;
    }
    double operator()(const node::FreeVar& n) const { return b.get(n.name); }
    double operator()(const node::Ramp& n) const { return std::max(0.0, n.b - resolve(n.args, b)); }
    double operator()(const node::PolyAt& n) const { return n.f(b.get(n.var)); }
    double operator()(const node::Sum& n) const {
        double acc = 0.0;
        for (const auto& t : n.terms) acc += (*this)(t);
        return acc;
    }
    double operator()(const node::Product& n) const {
        double acc = 1.0;
        for (const auto& t : n.factors) {
            acc *= (*this)(t);
            if (acc == 0.0) break;
        }
        return acc;
    }
    double operator()(const node::Power& n) const {
        const double x = (*this)(n.base[0]);
        double r = 1.0;
        for (int k = 0; k < n.n; ++k) r *= x;
        return r;
    }
    double operator()(const node::Exp& n) const { return std::exp((*this)(n.arg[0])); }
    double operator()(const node::Hermite& n) const { return scaled_hermite(n.n, (*this)(n.arg[0]), n.var); }
    double operator()(const node::KernelInt& n) const { return kernel_int_value(n, b, path); }
};

bool depends_on(const Expr& e, const std::string& var) {
    return std::visit(
        [&](const auto& n) -> bool {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, node::FreeVar>) {
                return n.name == var;
            } else if constexpr (std::is_same_v<N, node::Ramp>) {
                return std::find(n.args.vars.begin(), n.args.vars.end(), var) != n.args.vars.end();
            } else if constexpr (std::is_same_v<N, node::TimeInt>) {
                return std::find(n.lo.vars.begin(), n.lo.vars.end(), var) != n.lo.vars.end();
            } else if constexpr (std::is_same_v<N, node::PolyAt>) {
                return n.var == var;
            } else if constexpr (std::is_same_v<N, node::Sum>) {
                return std::any_of(n.terms.begin(), n.terms.end(), [&](const Expr& x) { return depends_on(x, var); });
            } else if constexpr (std::is_same_v<N, node::Product>) {
                return std::any_of(n.factors.begin(), n.factors.end(),
                                   [&](const Expr& x) { return depends_on(x, var); });
            } else if constexpr (std::is_same_v<N, node::Power>) {
                return depends_on(n.base[0], var);
            } else if constexpr (std::is_same_v<N, node::Exp> || std::is_same_v<N, node::Hermite>) {
                return depends_on(n.arg[0], var);
            } else if constexpr (std::is_same_v<N, node::KernelInt>) {
                return n.u != var && ((n.v == var && std::isnan(n.v_value)) || depends_on(n.body[0], var));
            } else {
                return false;
            }
        },
        e.node());
}

PiecewisePoly ramp_piecewise(double b, double m, double lo, double hi) {
    // (b - max(m, x))^+ on [lo, hi]
    std::vector<double> x{lo};
    std::vector<Poly> p;
    auto add = [&](double to, Poly q) {
        to = std::min(to, hi);
        if (to > x.back()) {
            x.push_back(to);
            p.push_back(std::move(q));
        }
    };
    add(m, Poly::constant(std::max(0.0, b - m)));
    add(b, Poly::linear(b, -1.0));
    add(hi, Poly{});
    if (p.empty()) return {};
    return PiecewisePoly(std::move(x), std::move(p)).simplified();
}

struct ToPiecewise {
    const std::string& var;
    double lo, hi;
    const Bindings& b;
    const PathView* path;

    using Out = std::optional<PiecewisePoly>;

    Out operator()(const Expr& e) const {
        if (!depends_on(e, var)) return flat(Evaluator{b, path}(e));
        return std::visit(*this, e.node());
    }
    Out flat(double c) const {
        if (c == 0.0 || !(hi > lo)) return PiecewisePoly{};
        return PiecewisePoly::on(lo, hi, Poly::constant(c));
    }
    Out operator()(const node::FreeVar&) const { return PiecewisePoly::on(lo, hi, Poly::linear(0.0, 1.0)); }
    Out operator()(const node::Ramp& n) const {
        double m = n.args.base;
        for (const auto& v : n.args.vars)
            if (v != var) m = std::max(m, b.get(v));
        return ramp_piecewise(n.b, m, lo, hi);
    }
    Out operator()(const node::PolyAt& n) const { return n.f.restricted(lo, hi); }
    Out operator()(const node::Sum& n) const {
        PiecewisePoly acc;
        for (const auto& t : n.terms) {
            auto x = (*this)(t);
            if (!x) return std::nullopt;
            acc = acc + *x;
        }
        return acc;
    }
    Out operator()(const node::Product& n) const {
        auto acc = flat(1.0);
        for (const auto& t : n.factors) {
            auto x = (*this)(t);
            if (!x) return std::nullopt;
            acc = *acc * *x;
            if (acc->empty()) return acc;
        }
        return acc;
    }
    Out operator()(const node::Power& n) const {
        auto x = (*this)(n.base[0]);
        if (!x) return std::nullopt;
        auto acc = flat(1.0);
        for (int k = 0; k < n.n; ++k) acc = *acc * *x;
        return acc;
    }
    template <class N>
    Out operator()(const N&) const {
        return std::nullopt;
    }
};

double kernel_int_value(const node::KernelInt& n, const Bindings& b, const PathView* path) {
    const double v = std::isnan(n.v_value) ? b.get(n.v) : n.v_value;
    const HurstParam H(n.h);
    const Expr& body = n.body[0];
    if (auto pw = to_piecewise(body, n.u, 0.0, n.T, b, path)) {
        PiecewisePoly w = *pw + pw->restricted(0.0, n.r);
        if (w.empty()) return 0.0;
        return 0.5 * phi_poly_moment(w, v, H);
    }
    Bindings bu = b;
    auto f = [&](double u) {
        bu.set(n.u, u);
        const double wr = u <= n.r ? 2.0 : 1.0;
        return 0.5 * H.kernel_constant() * wr * Evaluator{bu, path}(body);
    };
    std::vector<double> breaks = time_labels(body);
    breaks.push_back(n.r);
    for (const auto& name : free_vars(body))
        if (auto p = b.find(name)) breaks.push_back(*p);
    auto res = integrate_power_singular(f, 0.0, n.T, v, H.two_h() - 2.0, breaks);
    if (!res.converged)
        throw NumericalError("kernel integral did not converge (error " + format_double(res.error) + ")");
    return res.value;
}

// Direction of differentiation: a free variable or a numeric time.
struct Dir {
    const std::string* var;
    double t;
};

Expr deriv(const Expr& e, const Dir& d);

struct Deriv {
    const Expr& self;
    const Dir& d;

    Expr operator()(const node::Const&) const { return constant(0.0); }
    Expr operator()(const node::FreeVar&) const { return constant(0.0); }
    Expr operator()(const node::Ramp&) const { return constant(0.0); }
    Expr operator()(const node::PolyAt&) const { return constant(0.0); }
    Expr operator()(const node::Sample& n) const {
        if (d.var) return indicator(0.0, n.t, *d.var);
        return constant(d.t <= n.t ? 1.0 : 0.0);
    }
    Expr operator()(const node::WienerInt& n) const {
        if (d.var) return poly_at(n.f, *d.var);
        return constant(d.t >= n.a && d.t <= n.b ? n.f(d.t) : 0.0);
    }
    Expr operator()(const node::TimeInt& n) const {
        if (std::isfinite(n.frozen))
            throw UnsupportedNode("Malliavin derivative of a frozen time integral is not supported");
        const TimeRef lo = d.var ? n.lo.with(*d.var) : n.lo.with(d.t);
        if (n.power == 1) return ramp(n.hi, lo);
        return product({constant(2.0), time_int(lo, n.hi, 1)});
    }
    Expr operator()(const node::Sum& n) const {
        std::vector<Expr> t;
        t.reserve(n.terms.size());
        for (const auto& x : n.terms) t.push_back(deriv(x, d));
        return sum(std::move(t));
    }
    Expr operator()(const node::Product& n) const {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < n.factors.size(); ++i) {
            Expr di = deriv(n.factors[i], d);
            if (di.is_const(0.0)) continue;
            std::vector<Expr> f = n.factors;
            f[i] = di;
            terms.push_back(product(std::move(f)));
        }
        return sum(std::move(terms));
    }
    Expr operator()(const node::Power& n) const {
        Expr db = deriv(n.base[0], d);
        if (db.is_const(0.0)) return constant(0.0);
        return product({constant(n.n), power(n.base[0], n.n - 1), db});
    }
    Expr operator()(const node::Exp& n) const {
        Expr da = deriv(n.arg[0], d);
        if (da.is_const(0.0)) return constant(0.0);
        return product({self, da});
    }
    Expr operator()(const node::Hermite& n) const {
        Expr da = deriv(n.arg[0], d);
        if (da.is_const(0.0)) return constant(0.0);
        return product({constant(n.n), hermite(n.n - 1, n.arg[0], n.var), da});
    }
    Expr operator()(const node::KernelInt& n) const {
        if (d.var && *d.var == n.u) throw DomainError("derivative variable clashes with an integration variable");
        return rebuild(n, deriv(n.body[0], d));
    }
};

Expr deriv(const Expr& e, const Dir& d) { return std::visit(Deriv{e, d}, e.node()); }

struct Freezer {
    const Expr& self;
    double r;

    Expr operator()(const node::Sample& n) const { return sample(std::min(n.t, r)); }
    Expr operator()(const node::WienerInt& n) const {
        const double b = std::min(n.b, r);
        if (!(b > n.a)) return constant(0.0);
        return wiener_int(n.f, n.a, b);
    }
    Expr operator()(const node::TimeInt& n) const {
        if (n.lo.is_numeric() && !std::isfinite(n.frozen)) {
            const double a = n.lo.base;
            const double m = std::min(n.hi, r);
            std::vector<Expr> parts;
            if (m > a) parts.push_back(time_int(TimeRef{a, {}}, m, n.power));
            const double tail = n.hi - std::max(a, m);
            if (tail > 0.0) parts.push_back(product({constant(tail), power(sample(m), n.power)}));
            return sum(std::move(parts));
        }
        return time_int(n.lo, n.hi, n.power, std::min(n.frozen, r));
    }
    Expr operator()(const node::Sum& n) const {
        std::vector<Expr> t;
        for (const auto& x : n.terms) t.push_back(freeze(x, r));
        return sum(std::move(t));
    }
    Expr operator()(const node::Product& n) const {
        std::vector<Expr> t;
        for (const auto& x : n.factors) t.push_back(freeze(x, r));
        return product(std::move(t));
    }
    Expr operator()(const node::Power& n) const { return power(freeze(n.base[0], r), n.n); }
    Expr operator()(const node::Exp& n) const { return exp(freeze(n.arg[0], r)); }
    Expr operator()(const node::Hermite& n) const { return hermite(n.n, freeze(n.arg[0], r), n.var); }
    Expr operator()(const node::KernelInt& n) const { return rebuild(n, freeze(n.body[0], r)); }
    template <class N>
    Expr operator()(const N&) const {
        return self;
    }
};

}  // namespace

double eval(const Expr& e, const Bindings& b, const PathView* path) { return Evaluator{b, path}(e); }

double eval(const Expr& e, const Bindings& b, const PathView& path) { return Evaluator{b, &path}(e); }

std::optional<PiecewisePoly> to_piecewise(const Expr& e, const std::string& var, double lo, double hi,
                                          const Bindings& b, const PathView* path) {
    return ToPiecewise{var, lo, hi, b, path}(e);
}

Expr malliavin(const Expr& e, const std::string& var) { return deriv(e, Dir{&var, 0.0}); }

Expr malliavin_at(const Expr& e, double t) { return deriv(e, Dir{nullptr, t}); }

Expr freeze(const Expr& e, double r) {
    if (!(r >= 0.0)) throw DomainError("freeze time must be nonnegative");
    return std::visit(Freezer{e, r}, e.node());
}

bool is_discrete(const Expr& e, std::span<const double> times) {
    return std::visit(
        [&](const auto& n) -> bool {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, node::Const>) {
                return true;
            } else if constexpr (std::is_same_v<N, node::Sample>) {
                return std::any_of(times.begin(), times.end(), [&](double t) { return same_time(n.t, t); });
            } else if constexpr (std::is_same_v<N, node::Sum>) {
                return std::all_of(n.terms.begin(), n.terms.end(), [&](const Expr& x) { return is_discrete(x, times); });
            } else if constexpr (std::is_same_v<N, node::Product>) {
                return std::all_of(n.factors.begin(), n.factors.end(),
                                   [&](const Expr& x) { return is_discrete(x, times); });
            } else if constexpr (std::is_same_v<N, node::Power>) {
                return is_discrete(n.base[0], times);
            } else if constexpr (std::is_same_v<N, node::Exp> || std::is_same_v<N, node::Hermite>) {
                return is_discrete(n.arg[0], times);
            } else {
                return false;
            }
        },
        e.node());
}

Expr directional_partials(const Expr& e, const TimeGrid& grid, const std::vector<int>& q) {
    if (static_cast<int>(q.size()) != grid.J())
        throw DomainError("multi-index length must equal the number of grid cells");
    Expr g = e;
    for (int i = 1; i <= grid.J(); ++i) {
        const int qi = q[static_cast<std::size_t>(i - 1)];
        if (qi < 0) throw DomainError("multi-index entries must be nonnegative");
        for (int k = 0; k < qi; ++k) {
            g = malliavin_at(g, grid.t(i));
            if (g.is_const(0.0)) return g;
        }
    }
    return g;
}

Expr grid_partials(const Expr& e, const TimeGrid& grid, const std::vector<int>& q) {
    if (!is_discrete(e, grid.times()))
        throw DomainError("grid_partials needs a discrete functional of the grid samples");
    return directional_partials(e, grid, q);
}

}  // namespace fracexp
