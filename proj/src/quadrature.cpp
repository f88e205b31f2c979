#include "fracexp/quadrature.hpp"

#include "fracexp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace fracexp {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

QuadResult gauss_kronrod15(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kWgk[7], g = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x), f2 = f(c + x);
        k += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
    }
    QuadResult r;
    r.value = k * h;
    r.error = std::fabs((k - g) * h);
    r.evaluations = 15;
    return r;
}

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt) {
    return integrate(f, a, b, std::vector<double>{}, opt);
}

QuadResult integrate(const Integrand& f, double a, double b, std::vector<double> breaks,
                     const QuadOptions& opt) {
    QuadResult out;
    if (a == b) return out;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double p : breaks)
        if (p > a && p < b && p > pts.back()) pts.push_back(p);
    pts.push_back(b);

    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto r = gauss_kronrod15(f, pts[i], pts[i + 1]);
        out.evaluations += r.evaluations;
        heap.push({pts[i], pts[i + 1], r.value, r.error});
        total += r.value;
        total_err += r.error;
    }
    int panels = static_cast<int>(heap.size());
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) {
        if (panels >= opt.max_panels) {
            out.converged = false;
            break;
        }
        Panel p = heap.top();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            out.converged = false;
            break;
        }
        heap.pop();
        auto l = gauss_kronrod15(f, p.a, m);
        auto r = gauss_kronrod15(f, m, p.b);
        out.evaluations += l.evaluations + r.evaluations;
        heap.push({p.a, m, l.value, l.error});
        heap.push({m, p.b, r.value, r.error});
        ++panels;
        total += l.value + r.value - p.value;
        total_err += l.error + r.error - p.error;
    }
    // re-sum to shed accumulated cancellation in the running totals
    total = 0.0;
    total_err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_err += heap.top().error;
        heap.pop();
    }
    out.value = sign * total;
    out.error = total_err;
    return out;
}

QuadResult integrate_power_singular(const Integrand& f, double a, double b, double v, double alpha,
                                    std::vector<double> breaks, const QuadOptions& opt) {
    if (!(alpha > -1.0)) throw DomainError("integrate_power_singular: alpha must exceed -1");
    if (!(b > a)) return {};
    const double e = alpha + 1.0;
    const double p = 1.0 / e;
    // panel [lo, hi] with v outside or on its boundary; u = v + dir L s^p
    auto side = [&](double lo, double hi) {
        const double dir = (v <= lo) ? 1.0 : -1.0;
        const double L = (dir > 0) ? hi - v : v - lo;
        const double near = (dir > 0) ? lo - v : v - hi;
        std::vector<double> sb;
        for (double x : breaks)
            if (x > lo && x < hi) sb.push_back(std::pow(std::fabs(x - v) / L, e));
        auto g = [&](double s) { return f(v + dir * L * std::pow(s, p)); };
        QuadResult r = integrate(g, std::pow(near / L, e), 1.0, sb, opt);
        const double scale = std::pow(L, e) * p;
        r.value *= scale;
        r.error *= scale;
        return r;
    };
    if (v > a && v < b) {
        auto l = side(a, v), r = side(v, b);
        QuadResult out;
        out.value = l.value + r.value;
        out.error = l.error + r.error;
        out.evaluations = l.evaluations + r.evaluations;
        out.converged = l.converged && r.converged;
        return out;
    }
    return side(a, b);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(n - 1 - i);
        nodes[ui] = -x;
        nodes[uj] = x;
        weights[ui] = weights[uj] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace fracexp
