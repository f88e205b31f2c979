#include "fracexp/expr.hpp"

#include "fracexp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

namespace fracexp {

std::string format_double(double x) {
    if (x == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

TimeRef TimeRef::with(const std::string& var) const {
    TimeRef r = *this;
    if (std::find(r.vars.begin(), r.vars.end(), var) == r.vars.end()) {
        r.vars.push_back(var);
        std::sort(r.vars.begin(), r.vars.end());
    }
    return r;
}

TimeRef TimeRef::with(double t) const {
    TimeRef r = *this;
    r.base = std::max(r.base, t);
    return r;
}

namespace {

std::string pw_key(const PiecewisePoly& f) {
    std::string s = "(pw";
    const auto x = f.breakpoints();
    for (std::size_t k = 0; k < f.num_pieces(); ++k) {
        s += " [" + format_double(x[k]) + " " + format_double(x[k + 1]) + ":";
        for (double c : f.pieces()[k].coeffs()) s += " " + format_double(c);
        s += "]";
    }
    return s + ")";
}

bool is_indicator(const PiecewisePoly& f) {
    return f.num_pieces() == 1 && f.pieces()[0] == Poly::constant(1.0);
}

std::string timeref_key(const TimeRef& t) {
    if (t.vars.empty()) return format_double(t.base);
    std::string s = "(max " + format_double(t.base);
    for (const auto& v : t.vars) s += " " + v;
    return s + ")";
}

struct KeyVisitor {
    std::string operator()(const node::Const& n) const { return format_double(n.value); }
    std::string operator()(const node::Sample& n) const { return "(B " + format_double(n.t) + ")"; }
    std::string operator()(const node::WienerInt& n) const {
        return "(WI " + pw_key(n.f) + " " + format_double(n.a) + " " + format_double(n.b) + ")";
    }
    std::string operator()(const node::TimeInt& n) const {
        std::string s = (n.power == 1 ? "(IB " : "(IB2 ") + timeref_key(n.lo) + " " + format_double(n.hi);
        if (std::isfinite(n.frozen)) s += " (frozen " + format_double(n.frozen) + ")";
        return s + ")";
    }
    std::string operator()(const node::FreeVar& n) const { return n.name; }
    std::string operator()(const node::Ramp& n) const {
        return "(ramp " + format_double(n.b) + " " + timeref_key(n.args) + ")";
    }
    std::string operator()(const node::PolyAt& n) const {
        if (is_indicator(n.f))
            return "(chi " + format_double(n.f.lo()) + " " + format_double(n.f.hi()) + " " + n.var + ")";
        return "(poly " + pw_key(n.f) + " " + n.var + ")";
    }
    std::string operator()(const node::Sum& n) const { return join("+", n.terms); }
    std::string operator()(const node::Product& n) const { return join("*", n.factors); }
    std::string operator()(const node::Power& n) const {
        return "(^ " + n.base[0].key() + " " + std::to_string(n.n) + ")";
    }
    std::string operator()(const node::Exp& n) const { return "(exp " + n.arg[0].key() + ")"; }
    std::string operator()(const node::Hermite& n) const {
        return "(herm " + std::to_string(n.n) + " " + format_double(n.var) + " " + n.arg[0].key() + ")";
    }
    std::string operator()(const node::KernelInt& n) const {
        const std::string v = std::isnan(n.v_value) ? n.v : format_double(n.v_value);
        return "(A " + n.u + " " + v + " " + format_double(n.T) + " " + format_double(n.r) + " " +
               format_double(n.h) + " " + n.body[0].key() + ")";
    }
    static std::string join(const char* op, const std::vector<Expr>& xs) {
        std::string s = std::string("(") + op;
        for (const auto& x : xs) s += " " + x.key();
        return s + ")";
    }
};

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double c) : Expr(make(node::Const{c})) {}

Expr Expr::make(NodeVariant v) {
    auto n = std::make_shared<Node>();
    n->key = std::visit(KeyVisitor{}, v);
    n->v = std::move(v);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

double Expr::const_value() const {
    auto p = as<node::Const>();
    if (!p) throw EvalError("expression is not a constant");
    return p->value;
}

Expr constant(double c) { return Expr::make(node::Const{c}); }

Expr sample(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("sample time must be finite and nonnegative");
    if (t == 0.0) return constant(0.0);
    return Expr::make(node::Sample{t});
}

Expr wiener_int(PiecewisePoly f, double a, double b) {
    if (!(a >= 0.0) || !(b >= a)) throw DomainError("Wiener integral needs 0 <= a <= b");
    f = f.restricted(a, b);
    if (f.empty()) return constant(0.0);
    return Expr::make(node::WienerInt{std::move(f), a, b});
}

Expr time_int(TimeRef lo, double hi, int power, double frozen) {
    if (power != 1 && power != 2) throw DomainError("time integral power must be 1 or 2");
    if (lo.is_numeric() && !(lo.base < hi)) return constant(0.0);
    if (frozen <= 0.0) return constant(0.0);
    if (frozen >= hi) frozen = std::numeric_limits<double>::infinity();
    return Expr::make(node::TimeInt{std::move(lo), hi, power, frozen});
}

Expr time_int(double a, double b) {
    if (!(a >= 0.0) || !(b >= a)) throw DomainError("time integral needs 0 <= a <= b");
    return time_int(TimeRef{a, {}}, b, 1);
}

Expr time_int_sq(double a, double b) {
    if (!(a >= 0.0) || !(b >= a)) throw DomainError("time integral needs 0 <= a <= b");
    return time_int(TimeRef{a, {}}, b, 2);
}

Expr free_var(const std::string& name) { return Expr::make(node::FreeVar{name}); }

Expr ramp(double b, TimeRef args) {
    if (args.is_numeric()) return constant(std::max(0.0, b - args.base));
    return Expr::make(node::Ramp{b, std::move(args)});
}

Expr poly_at(PiecewisePoly f, const std::string& var) {
    f = f.simplified();
    if (f.empty()) return constant(0.0);
    return Expr::make(node::PolyAt{std::move(f), var});
}

Expr indicator(double lo, double hi, const std::string& var) {
    return poly_at(PiecewisePoly::indicator(lo, hi), var);
}

namespace {

// split c * rest for like-term merging
std::pair<double, Expr> split_coeff(const Expr& e) {
    if (auto c = e.as<node::Const>()) return {c->value, constant(1.0)};
    if (auto p = e.as<node::Product>()) {
        if (p->factors.front().is_const()) {
            std::vector<Expr> rest(p->factors.begin() + 1, p->factors.end());
            if (rest.size() == 1) return {p->factors.front().const_value(), rest.front()};
            return {p->factors.front().const_value(), Expr::make(node::Product{std::move(rest)})};
        }
    }
    return {1.0, e};
}

}  // namespace

Expr sum(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    for (auto& t : terms) {
        if (auto s = t.as<node::Sum>()) flat.insert(flat.end(), s->terms.begin(), s->terms.end());
        else flat.push_back(t);
    }
    double c = 0.0;
    std::vector<std::pair<double, Expr>> parts;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& t : flat) {
        auto [k, rest] = split_coeff(t);
        if (rest.is_const()) {
            c += k * rest.const_value();
            continue;
        }
        auto it = index.find(rest.key());
        if (it == index.end()) {
            index.emplace(rest.key(), parts.size());
            parts.emplace_back(k, rest);
        } else {
            parts[it->second].first += k;
        }
    }
    std::vector<Expr> out;
    for (auto& [k, rest] : parts) {
        if (k == 0.0) continue;
        out.push_back(k == 1.0 ? rest : product({constant(k), rest}));
    }
    if (c != 0.0) out.insert(out.begin(), constant(c));
    if (out.empty()) return constant(0.0);
    if (out.size() == 1) return out.front();
    return Expr::make(node::Sum{std::move(out)});
}

Expr product(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    for (auto& f : factors) {
        if (auto p = f.as<node::Product>()) flat.insert(flat.end(), p->factors.begin(), p->factors.end());
        else flat.push_back(f);
    }
    double c = 1.0;
    std::vector<std::pair<Expr, int>> parts;  // base, exponent
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& f : flat) {
        if (auto k = f.as<node::Const>()) {
            c *= k->value;
            continue;
        }
        Expr base = f;
        int n = 1;
        if (auto p = f.as<node::Power>()) {
            base = p->base[0];
            n = p->n;
        }
        auto it = index.find(base.key());
        if (it == index.end()) {
            index.emplace(base.key(), parts.size());
            parts.emplace_back(base, n);
        } else {
            parts[it->second].second += n;
        }
    }
    if (c == 0.0) return constant(0.0);
    std::vector<Expr> out;
    for (auto& [base, n] : parts) out.push_back(power(base, n));
    if (out.empty()) return constant(c);
    if (out.size() == 1) {
        if (c == 1.0) return out.front();
        if (auto s = out.front().as<node::Sum>()) {
            std::vector<Expr> scaled;
            for (const auto& t : s->terms) scaled.push_back(product({constant(c), t}));
            return sum(std::move(scaled));
        }
    }
    if (c != 1.0) out.insert(out.begin(), constant(c));
    return Expr::make(node::Product{std::move(out)});
}

Expr power(const Expr& base, int n) {
    if (n < 0) throw DomainError("power exponent must be a nonnegative integer");
    if (n == 0) return constant(1.0);
    if (n == 1) return base;
    if (auto c = base.as<node::Const>()) return constant(std::pow(c->value, n));
    if (auto p = base.as<node::Power>()) return power(p->base[0], p->n * n);
    return Expr::make(node::Power{{base}, n});
}

Expr exp(const Expr& arg) {
    if (auto c = arg.as<node::Const>()) return constant(std::exp(c->value));
    return Expr::make(node::Exp{{arg}});
}

Expr hermite(int n, const Expr& arg, double var) {
    if (n < 0) throw DomainError("Hermite degree must be nonnegative");
    if (!(var >= 0.0)) throw DomainError("Hermite variance must be nonnegative");
    if (n == 0) return constant(1.0);
    if (n == 1) return arg;
    if (var == 0.0) return power(arg, n);
    if (auto c = arg.as<node::Const>()) {
        double h0 = 1.0, h1 = c->value;
        for (int k = 2; k <= n; ++k) {
            const double h2 = c->value * h1 - (k - 1) * var * h0;
            h0 = h1;
            h1 = h2;
        }
        return constant(h1);
    }
    return Expr::make(node::Hermite{n, {arg}, var});
}

Expr kernel_int(const Expr& body, const std::string& u, const std::string& v, double T, double r, double h) {
    if (body.is_const(0.0)) return constant(0.0);
    if (!(h > 0.5 && h < 1.0)) throw DomainError("kernel integral needs 1/2 < H < 1");
    if (!(r >= 0.0 && r <= T)) throw DomainError("kernel integral needs 0 <= r <= T");
    return Expr::make(node::KernelInt{{body}, u, v, T, r, h});
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, product({constant(-1.0), b})}); }
Expr operator-(const Expr& a) { return product({constant(-1.0), a}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }

std::string to_sexpr(const Expr& e) { return e.key(); }

namespace {

template <class F>
void walk(const Expr& e, F&& f) {
    f(e);
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, node::Sum>) {
                for (const auto& t : n.terms) walk(t, f);
            } else if constexpr (std::is_same_v<N, node::Product>) {
                for (const auto& t : n.factors) walk(t, f);
            } else if constexpr (std::is_same_v<N, node::Power>) {
                walk(n.base[0], f);
            } else if constexpr (std::is_same_v<N, node::Exp> || std::is_same_v<N, node::Hermite>) {
                walk(n.arg[0], f);
            } else if constexpr (std::is_same_v<N, node::KernelInt>) {
                walk(n.body[0], f);
            }
        },
        e.node());
}

}  // namespace

std::vector<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    walk(e, [&](const Expr& x) {
        if (auto v = x.as<node::FreeVar>()) out.insert(v->name);
        else if (auto r = x.as<node::Ramp>()) out.insert(r->args.vars.begin(), r->args.vars.end());
        else if (auto p = x.as<node::PolyAt>()) out.insert(p->var);
        else if (auto t = x.as<node::TimeInt>()) out.insert(t->lo.vars.begin(), t->lo.vars.end());
    });
    std::set<std::string> bound;
    walk(e, [&](const Expr& x) {
        if (auto k = x.as<node::KernelInt>()) {
            bound.insert(k->u);
            if (std::isnan(k->v_value)) out.insert(k->v);
        }
    });
    for (const auto& b : bound) out.erase(b);
    return {out.begin(), out.end()};
}

std::vector<double> sample_times(const Expr& e) {
    std::set<double> out;
    walk(e, [&](const Expr& x) {
        if (auto s = x.as<node::Sample>()) out.insert(s->t);
    });
    return {out.begin(), out.end()};
}

std::vector<double> time_labels(const Expr& e) {
    std::set<double> out;
    walk(e, [&](const Expr& x) {
        if (auto s = x.as<node::Sample>()) out.insert(s->t);
        else if (auto w = x.as<node::WienerInt>()) {
            out.insert(w->a);
            out.insert(w->b);
            out.insert(w->f.breakpoints().begin(), w->f.breakpoints().end());
        } else if (auto t = x.as<node::TimeInt>()) {
            out.insert(t->lo.base);
            out.insert(t->hi);
            if (std::isfinite(t->frozen)) out.insert(t->frozen);
        } else if (auto r = x.as<node::Ramp>()) {
            out.insert(r->b);
            out.insert(r->args.base);
        } else if (auto p = x.as<node::PolyAt>()) {
            out.insert(p->f.breakpoints().begin(), p->f.breakpoints().end());
        } else if (auto k = x.as<node::KernelInt>()) {
            out.insert(k->r);
            out.insert(k->T);
        }
    });
    return {out.begin(), out.end()};
}

std::size_t tree_size(const Expr& e) {
    std::size_t n = 0;
    walk(e, [&](const Expr&) { ++n; });
    return n;
}

bool is_deterministic(const Expr& e) {
    bool det = true;
    walk(e, [&](const Expr& x) {
        if (x.as<node::Sample>() || x.as<node::WienerInt>() || x.as<node::TimeInt>()) det = false;
    });
    return det;
}

Expr bind(const Expr& e, const std::string& var, double value) {
    return std::visit(
        [&](const auto& n) -> Expr {
            using N = std::decay_t<decltype(n)>;
            auto drop = [&](TimeRef t) {
                auto it = std::find(t.vars.begin(), t.vars.end(), var);
                if (it != t.vars.end()) {
                    t.vars.erase(it);
                    t.base = std::max(t.base, value);
                }
                return t;
            };
            if constexpr (std::is_same_v<N, node::FreeVar>) {
                return n.name == var ? constant(value) : e;
            } else if constexpr (std::is_same_v<N, node::Ramp>) {
                return ramp(n.b, drop(n.args));
            } else if constexpr (std::is_same_v<N, node::PolyAt>) {
                return n.var == var ? constant(n.f(value)) : e;
            } else if constexpr (std::is_same_v<N, node::TimeInt>) {
                return time_int(drop(n.lo), n.hi, n.power, n.frozen);
            } else if constexpr (std::is_same_v<N, node::Sum>) {
                std::vector<Expr> t;
                for (const auto& x : n.terms) t.push_back(bind(x, var, value));
                return sum(std::move(t));
            } else if constexpr (std::is_same_v<N, node::Product>) {
                std::vector<Expr> t;
                for (const auto& x : n.factors) t.push_back(bind(x, var, value));
                return product(std::move(t));
            } else if constexpr (std::is_same_v<N, node::Power>) {
                return power(bind(n.base[0], var, value), n.n);
            } else if constexpr (std::is_same_v<N, node::Exp>) {
                return exp(bind(n.arg[0], var, value));
            } else if constexpr (std::is_same_v<N, node::Hermite>) {
                return hermite(n.n, bind(n.arg[0], var, value), n.var);
            } else if constexpr (std::is_same_v<N, node::KernelInt>) {
                if (var == n.u) return e;
                if (var == n.v && std::isnan(n.v_value)) {
                    const Expr body = bind(n.body[0], var, value);
                    if (body.is_const(0.0)) return constant(0.0);
                    return Expr::make(node::KernelInt{{body}, n.u, n.v, n.T, n.r, n.h, value});
                }
                return kernel_int(bind(n.body[0], var, value), n.u, n.v, n.T, n.r, n.h);
            } else {
                return e;
            }
        },
        e.node());
}

}  // namespace fracexp
