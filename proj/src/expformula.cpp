#include "fracexp/expformula.hpp"

#include "fracexp/errors.hpp"
#include "fracexp/fbm.hpp"
#include "fracexp/kernel.hpp"
#include "fracexp/quadrature.hpp"
#include "fracexp/special.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <set>

namespace fracexp {

namespace {

std::string v_name(int k) { return "v" + std::to_string(k); }
std::string u_name(const std::string& v) { return "u_" + v; }
std::string u_name(int k) { return u_name(v_name(k)); }

void check_horizon(double r, double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon T must be positive");
    if (!(r >= 0.0) || r > T) throw DomainError("r must lie in [0, T]");
}

// sum of products: coefficient and non-constant, non-sum factors
using Monomial = std::pair<double, std::vector<Expr>>;

std::vector<Monomial> expand(const Expr& e) {
    if (auto c = e.as<node::Const>()) {
        if (c->value == 0.0) return {};
        return {{c->value, {}}};
    }
    if (auto s = e.as<node::Sum>()) {
        std::vector<Monomial> out;
        for (const auto& t : s->terms) {
            auto x = expand(t);
            out.insert(out.end(), x.begin(), x.end());
        }
        return out;
    }
    auto multiply = [](const std::vector<Monomial>& a, const std::vector<Monomial>& b) {
        std::vector<Monomial> out;
        out.reserve(a.size() * b.size());
        for (const auto& [ca, fa] : a)
            for (const auto& [cb, fb] : b) {
                auto f = fa;
                f.insert(f.end(), fb.begin(), fb.end());
                out.emplace_back(ca * cb, std::move(f));
            }
        return out;
    };
    if (auto p = e.as<node::Product>()) {
        std::vector<Monomial> acc{{1.0, {}}};
        for (const auto& f : p->factors) acc = multiply(acc, expand(f));
        return acc;
    }
    if (auto p = e.as<node::Power>()) {
        const auto base = expand(p->base[0]);
        std::vector<Monomial> acc{{1.0, {}}};
        for (int k = 0; k < p->n; ++k) acc = multiply(acc, base);
        return acc;
    }
    return {{1.0, {e}}};
}

struct Component {
    std::vector<int> us;  // u indices, 1-based
    Expr factor;
};

struct ProdTerm {
    double coef = 1.0;
    std::vector<Expr> fixed;
    std::vector<Component> comps;
    std::vector<int> lone;  // u indices with no factor
};

std::vector<ProdTerm> split_terms(const Expr& D, int i) {
    std::vector<ProdTerm> out;
    for (auto& [c, factors] : expand(D)) {
        ProdTerm pt;
        pt.coef = c;
        std::vector<int> parent(static_cast<std::size_t>(i + 1));
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
            return x;
        };
        std::vector<std::vector<int>> deps;
        std::vector<bool> used(static_cast<std::size_t>(i + 1), false);
        for (const auto& f : factors) {
            std::vector<int> d;
            const auto fv = free_vars(f);
            for (int k = 1; k <= i; ++k)
                if (std::find(fv.begin(), fv.end(), u_name(k)) != fv.end()) d.push_back(k);
            for (int k : d) used[static_cast<std::size_t>(k)] = true;
            for (std::size_t m = 1; m < d.size(); ++m) parent[static_cast<std::size_t>(find(d[m]))] = find(d[0]);
            deps.push_back(std::move(d));
        }
        std::vector<std::vector<Expr>> groups(static_cast<std::size_t>(i + 1));
        for (std::size_t m = 0; m < factors.size(); ++m) {
            if (deps[m].empty()) pt.fixed.push_back(factors[m]);
            else groups[static_cast<std::size_t>(find(deps[m][0]))].push_back(factors[m]);
        }
        for (int k = 1; k <= i; ++k) {
            if (!used[static_cast<std::size_t>(k)]) {
                pt.lone.push_back(k);
                continue;
            }
            if (find(k) != k) continue;
            Component comp;
            for (int m = 1; m <= i; ++m)
                if (used[static_cast<std::size_t>(m)] && find(m) == k) comp.us.push_back(m);
            comp.factor = product(groups[static_cast<std::size_t>(k)]);
            pt.comps.push_back(std::move(comp));
        }
        out.push_back(std::move(pt));
    }
    return out;
}

struct GenericTerm {
    int i = 0;
    std::vector<ProdTerm> prods;
    std::vector<double> breaks;
    bool deterministic = false;
    double value = 0.0;
    double error = 0.0;
};

constexpr std::size_t kMaxLatticePoints = 4096;

}  // namespace

Expr apply_A(const Expr& F, const std::string& v, double r, double T, HurstParam H) {
    check_horizon(r, T);
    const std::string u = u_name(v);
    const Expr body = malliavin(malliavin(F, v), u);
    return kernel_int(body, u, v, T, r, H.value());
}

Expr iterated_A(const Expr& F, double r, double T, HurstParam H, int i) {
    if (i < 0) throw DomainError("order must be nonnegative");
    Expr e = F;
    for (int k = 1; k <= i; ++k) e = apply_A(e, v_name(k), r, T, H);
    return freeze(e, r);
}

struct ExpSeriesEngine::Impl {
    Expr F;
    double r, T;
    HurstParam H;
    int order;
    QuadPlan quad;
    Expr frozen_F;

    bool factorized = false;
    double a = 0.0;  // per-order factor in the closed form

    std::vector<GenericTerm> generic;  // index i - 1
    mutable std::once_flag cached;  // deterministic generic terms are integrated once

    void integrate_deterministic() const {
        std::call_once(cached, [this] {
            for (auto& g : const_cast<std::vector<GenericTerm>&>(generic)) {
                if (!g.deterministic || g.prods.empty()) continue;
                const auto res = simplex(g, 1, r, {}, nullptr);
                g.value = res.value;
                g.error = res.error;
            }
        });
    }

    Impl(const Expr& F_, double r_, double T_, HurstParam H_, int order_, QuadPlan q)
        : F(F_), r(r_), T(T_), H(H_), order(order_), quad(std::move(q)), frozen_F(freeze(F_, r_)) {}

    QuadOptions options() const {
        QuadOptions o;
        o.rel_tol = quad.rel_tol;
        o.abs_tol = quad.abs_tol;
        o.max_panels = 4000;
        return o;
    }

    // 1-D integral honoring the plan
    QuadResult integrate_1d(const Integrand& f, double lo, double hi, const std::vector<double>& breaks) const {
        if (!(hi > lo)) return {};
        if (quad.points_per_dim <= 0) return integrate(f, lo, hi, breaks, options());
        std::vector<double> x{lo};
        for (double b : breaks)
            if (b > lo && b < hi) x.push_back(b);
        x.push_back(hi);
        std::sort(x.begin(), x.end());
        std::vector<double> nodes, weights;
        gauss_legendre(quad.points_per_dim, nodes, weights);
        QuadResult res;
        for (std::size_t k = 0; k + 1 < x.size(); ++k) {
            const double c = 0.5 * (x[k] + x[k + 1]), h = 0.5 * (x[k + 1] - x[k]);
            if (!(h > 0.0)) continue;
            for (std::size_t m = 0; m < nodes.size(); ++m) res.value += h * weights[m] * f(c + h * nodes[m]);
            res.evaluations += static_cast<int>(nodes.size());
        }
        return res;
    }

    // (1/2) int w_r(u) phi(u, v) du over [0, T]
    double alpha0(double v) const {
        double s = phi_antiderivative(0.0, T, v, H);
        if (r > 0.0) s += phi_antiderivative(0.0, r, v, H);
        return 0.5 * s;
    }

    double component_value(const Component& c, std::size_t idx, Bindings b, const std::vector<double>& breaks,
                           const PathView* path) const {
        const int k = c.us[idx];
        const std::string u = u_name(k);
        const double v = b.get(v_name(k));
        if (idx + 1 == c.us.size()) {
            if (auto pw = to_piecewise(c.factor, u, 0.0, T, b, path)) {
                PiecewisePoly w = *pw + pw->restricted(0.0, r);
                if (w.empty()) return 0.0;
                return 0.5 * phi_poly_moment(w, v, H);
            }
        }
        std::vector<double> br = breaks;
        br.push_back(r);
        for (const auto& kv : b.entries()) br.push_back(kv.second);
        const double kc = H.kernel_constant();
        auto f = [&](double x) {
            Bindings bx = b;
            bx.set(u, x);
            const double wr = x <= r ? 2.0 : 1.0;
            const double inner = (idx + 1 == c.us.size()) ? eval(c.factor, bx, path)
                                                           : component_value(c, idx + 1, bx, breaks, path);
            return 0.5 * kc * wr * inner;
        };
        return integrate_power_singular(f, 0.0, T, v, H.two_h() - 2.0, br, options()).value;
    }

    double integrand(const GenericTerm& g, const Bindings& b, const PathView* path) const {
        double acc = 0.0;
        for (const auto& pt : g.prods) {
            double val = pt.coef;
            for (const auto& f : pt.fixed) {
                val *= eval(f, b, path);
                if (val == 0.0) break;
            }
            if (val == 0.0) continue;
            for (int k : pt.lone) val *= alpha0(b.get(v_name(k)));
            for (const auto& c : pt.comps) {
                val *= component_value(c, 0, b, g.breaks, path);
                if (val == 0.0) break;
            }
            acc += val;
        }
        return acc;
    }

    QuadResult simplex(const GenericTerm& g, int k, double lo, const Bindings& b, const PathView* path) const {
        if (k > g.i) return {integrand(g, b, path), 0.0, 1, true};
        auto f = [&](double v) {
            Bindings bv = b;
            bv.set(v_name(k), v);
            return simplex(g, k + 1, v, bv, path).value;
        };
        return integrate_1d(f, lo, T, g.breaks);
    }

    void build() {
        if (quad.strategy != QuadPlan::Strategy::TensorSimplex) detect_factorized();
        if (factorized) return;
        if (quad.strategy == QuadPlan::Strategy::Exact)
            throw UnsupportedNode("exact strategy needs F = c exp(G) with a deterministic derivative of G");
        Expr D = F;
        for (int i = 1; i <= order; ++i) {
            GenericTerm g;
            g.i = i;
            if (!D.is_const(0.0)) D = malliavin(malliavin(D, v_name(i)), u_name(i));
            const Expr Dr = freeze(D, r);
            if (!Dr.is_const(0.0) && r < T) {
                if (i > kMaxGenericOrder)
                    throw DomainError("exponential series of a non-factorizing functional is supported up to order " +
                                      std::to_string(kMaxGenericOrder));
                g.prods = split_terms(Dr, i);
                std::set<double> br(quad.breakpoints.begin(), quad.breakpoints.end());
                for (double t : time_labels(Dr)) br.insert(t);
                br.insert(r);
                br.insert(T);
                g.breaks.assign(br.begin(), br.end());
                g.deterministic = is_deterministic(Dr);
            } else {
                g.deterministic = true;
            }
            generic.push_back(std::move(g));
        }
    }

    void detect_factorized() {
        // F = exp(G) or c exp(G)
        const node::Exp* e = F.as<node::Exp>();
        if (auto p = F.as<node::Product>(); p && p->factors.size() == 2 && p->factors[0].is_const())
            e = p->factors[1].as<node::Exp>();
        if (!e) return;
        const Expr g = malliavin(e->arg[0], "u");
        if (!is_deterministic(g)) return;
        for (const auto& name : free_vars(g))
            if (name != "u") return;
        if (!malliavin(g, "w").is_const(0.0)) return;
        auto pw = to_piecewise(g, "u", 0.0, T);
        if (!pw) return;
        const PiecewisePoly left = *pw + pw->restricted(0.0, r);
        const PiecewisePoly right = pw->restricted(r, T);
        a = (left.empty() || right.empty() || !(T > r)) ? 0.0 : 0.5 * inner_product(left, right, H);
        factorized = true;
    }
};

ExpSeriesEngine::ExpSeriesEngine(const Expr& F, double r, double T, HurstParam H, int order, QuadPlan quad) {
    check_horizon(r, T);
    if (order < 0) throw DomainError("order must be nonnegative");
    impl_ = std::make_unique<Impl>(F, r, T, H, order, std::move(quad));
    impl_->build();
}

ExpSeriesEngine::~ExpSeriesEngine() = default;
ExpSeriesEngine::ExpSeriesEngine(ExpSeriesEngine&&) noexcept = default;
ExpSeriesEngine& ExpSeriesEngine::operator=(ExpSeriesEngine&&) noexcept = default;

bool ExpSeriesEngine::factorized() const { return impl_->factorized; }

std::vector<ATerm> ExpSeriesEngine::terms(const PathView* path) const {
    const auto& m = *impl_;
    std::vector<ATerm> out;
    const double f0 = eval(m.frozen_F, {}, path);
    out.push_back({0, m.frozen_F, f0, 0.0});
    if (!m.factorized) m.integrate_deterministic();
    double pw = 1.0;
    for (int i = 1; i <= m.order; ++i) {
        ATerm t;
        t.order = i;
        if (m.factorized) {
            pw *= m.a / i;
            t.value = f0 * pw;
        } else {
            const auto& g = m.generic[static_cast<std::size_t>(i - 1)];
            if (g.deterministic) {
                t.value = g.value;
                t.error = g.error;
            } else {
                const auto res = m.simplex(g, 1, m.r, {}, path);
                t.value = res.value;
                t.error = res.error;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

SeriesResult ExpSeriesEngine::evaluate(const PathView* path) const {
    SeriesResult res;
    res.diagnostics_label = "quad_error";
    for (const auto& t : terms(path)) {
        res.push(t.value);
        res.diagnostics.push_back(t.error);
    }
    return res;
}

SeriesResult exp_series(const Expr& F, double r, double T, HurstParam H, int order, const PathView* path,
                        const QuadPlan& quad) {
    return ExpSeriesEngine(F, r, T, H, order, quad).evaluate(path);
}

SupEstimator frozen_sup_estimator(const Expr& F, double r, double T, HurstParam H, long n_paths, int points_per_dim,
                                  unsigned long long seed) {
    check_horizon(r, T);
    if (points_per_dim < 1) throw DomainError("points_per_dim must be positive");
    return [=](int m) {
        Expr D = F;
        std::vector<std::string> vars;
        for (int k = 1; k <= m; ++k) {
            vars.push_back("x" + std::to_string(k));
            D = malliavin(D, vars.back());
        }
        D = freeze(D, r);
        if (D.is_const()) return std::fabs(D.const_value());
        std::vector<double> lattice;
        for (int j = 0; j < points_per_dim; ++j) lattice.push_back((j + 0.5) * T / points_per_dim);
        // full lattice when small, else its diagonal plus seeded random lattice points
        std::vector<std::vector<double>> pts;
        const double full = std::pow(static_cast<double>(points_per_dim), m);
        if (full <= static_cast<double>(kMaxLatticePoints)) {
            std::vector<int> idx(static_cast<std::size_t>(m), 0);
            for (;;) {
                std::vector<double> x;
                for (int j : idx) x.push_back(lattice[static_cast<std::size_t>(j)]);
                pts.push_back(std::move(x));
                std::size_t k = 0;
                while (k < idx.size() && idx[k] == points_per_dim - 1) idx[k++] = 0;
                if (k == idx.size()) break;
                ++idx[k];
            }
        } else {
            for (double x : lattice) pts.emplace_back(static_cast<std::size_t>(m), x);
            std::mt19937_64 rng(seed);
            std::uniform_int_distribution<int> pick(0, points_per_dim - 1);
            while (pts.size() < kMaxLatticePoints) {
                std::vector<double> x;
                for (int k = 0; k < m; ++k) x.push_back(lattice[static_cast<std::size_t>(pick(rng))]);
                pts.push_back(std::move(x));
            }
        }
        auto sup_on = [&](const PathView* pv) {
            double mx = 0.0;
            Bindings b;
            for (const auto& x : pts) {
                for (int k = 0; k < m; ++k) b.set(vars[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(k)]);
                mx = std::max(mx, std::fabs(eval(D, b, pv)));
            }
            return mx;
        };
        if (is_deterministic(D)) return sup_on(nullptr);
        std::vector<double> times;
        for (double t : time_labels(D))
            if (t > 0.0) times.push_back(t);
        if (r > 0.0) times.push_back(r);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        McConfig cfg;
        cfg.n_paths = n_paths;
        cfg.seed = seed;
        const auto ens = simulate(TimeGrid(times), cfg, H);
        double acc = 0.0;
        for (long p = 0; p < ens.n_paths(); ++p) {
            const PathView pv = ens.path(p);
            const double s = sup_on(&pv);
            acc += s * s;
        }
        return std::sqrt(acc / static_cast<double>(ens.n_paths()));
    };
}

std::vector<double> assumption_b_sequence(const Expr& F, double r, double T, HurstParam H, int i_max,
                                          const SupEstimator& sup) {
    (void)F;
    check_horizon(r, T);
    const double c = std::pow(T, H.two_h()) - std::pow(r, H.two_h());
    std::vector<double> out;
    double acc = 0.0;
    for (int i = 1; i <= i_max; ++i) {
        const double s = sup(2 * i);
        if (s != 0.0) acc += s * std::exp(i * std::log(0.5 * c) - std::lgamma(i + 1.0));
        out.push_back(acc);
    }
    return out;
}

std::array<double, 3> cir_fourth_order_closed_form(double T, HurstParam H) {
    if (!(T > 0.0)) throw DomainError("horizon T must be positive");
    const double h = H.value();
    const double scale = std::pow(T, 4.0 * h + 2.0);
    const double B = beta_fn(2.0 * h + 1.0, 2.0 * h + 2.0);
    return {(2.0 * h - 1.0) * (h + 2.0) / ((2.0 * h + 1.0) * (4.0 * h + 2.0) * (4.0 * h - 1.0)) * scale,
            ((8.0 * h * h + 14.0 * h - 1.0) / (4.0 * (4.0 * h + 1.0) * (2.0 * h + 1.0) * (4.0 * h - 1.0)) -
             (6.0 * h + 5.0) / (2.0 * h + 1.0) * B) *
                scale,
            (6.0 * h + 4.0) / (2.0 * h + 1.0) * B * scale};
}

CirFourthOrder cir_fourth_order_integral(double T, HurstParam H) {
    const double h = H.value();
    const double a = 2.0 * h - 1.0;
    const double scale = std::pow(T, 4.0 * h + 2.0);

    CirFourthOrder out;
    out.closed_form = cir_fourth_order_closed_form(T, H);

    // Four-fold simplex integral with the innermost u2 done exactly and
    // v1 = u1 + w^{1/a} removing the (v1 - u1)^{a-1} singularity.
    const double c = 4.0 * H.kernel_constant() * H.kernel_constant();
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-15 * scale;
    opt.max_panels = 4000;
    for (int which = 1; which <= 3; ++which) {
        bool ok = true;
        double err = 0.0;
        auto outer = [&](double u1) {
            auto middle = [&](double w) {
                const double v1 = u1 + std::pow(w, 1.0 / a);
                if (!(v1 < T)) return 0.0;
                auto inner = [&](double v2) {
                    auto m0 = [&](double lo, double hi) { return (std::pow(v2 - lo, a) - std::pow(v2 - hi, a)) / a; };
                    auto m1 = [&](double lo, double hi) {
                        return (T - v2) * m0(lo, hi) +
                               (std::pow(v2 - lo, a + 1.0) - std::pow(v2 - hi, a + 1.0)) / (a + 1.0);
                    };
                    switch (which) {
                        case 1: return ((T - u1) * (T - v2) + 2.0 * (T - v1) * (T - v2)) * m0(0.0, u1) / a;
                        case 2: return ((T - v2) * m1(u1, v1) + 2.0 * (T - v1) * (T - v2) * m0(u1, v1)) / a;
                        default: return (2.0 * (T - v2) * m1(v1, v2) + (T - v1) * (T - v2) * m0(v1, v2)) / a;
                    }
                };
                const auto r = integrate(inner, v1, T, opt);
                ok = ok && r.converged;
                return r.value;
            };
            const auto r = integrate(middle, 0.0, std::pow(T - u1, a), opt);
            ok = ok && r.converged;
            return r.value;
        };
        const auto res = integrate(outer, 0.0, T, opt);
        err = res.error;
        const auto k = static_cast<std::size_t>(which - 1);
        out.quadrature[k] = c * res.value;
        out.error[k] = c * err;
        out.converged = out.converged && ok && res.converged;
    }
    return out;
}

}  // namespace fracexp
