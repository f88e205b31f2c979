#include "fracexp/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace fracexp {

namespace {

double sgn_pow(double x, int m) {
    if (m % 2 == 0) return 1.0;
    return x < 0.0 ? -1.0 : 1.0;
}

// sgn(x)^k |x|^p, with 0 -> 0 (p > 0 here)
double signed_abs_pow(double x, int k, double p) {
    if (x == 0.0) return 0.0;
    return sgn_pow(x, k) * abs_pow(x, p);
}

}  // namespace

double phi(double u, double v, HurstParam H) {
    if (u == v) throw DiagonalSingularity("phi is singular on the diagonal u == v");
    return H.kernel_constant() * abs_pow(u - v, H.two_h() - 2.0);
}

double phi_antiderivative(double a, double b, double v, HurstParam H) {
    Interval iv(a, b);
    if (iv.length() == 0.0) return 0.0;
    const double e = H.two_h() - 1.0;
    return H.value() * (signed_abs_pow(b - v, 1, e) - signed_abs_pow(a - v, 1, e));
}

double rect_integral(const Interval& u_iv, const Interval& v_iv, HurstParam H) {
    const double a = u_iv.lo(), b = u_iv.hi(), c = v_iv.lo(), d = v_iv.hi();
    const double p = H.two_h();
    return 0.5 * (abs_pow(d - a, p) + abs_pow(c - b, p) - abs_pow(c - a, p) - abs_pow(d - b, p));
}

double signed_power_moment(const Poly& P, double c, int m, double gamma, double lo, double hi) {
    if (!(hi > lo) || P.is_zero()) return 0.0;
    const Poly e = P.shifted(c);
    double acc = 0.0;
    const auto coeffs = e.coeffs();
    for (std::size_t l = 0; l < coeffs.size(); ++l) {
        if (coeffs[l] == 0.0) continue;
        const int k = m + static_cast<int>(l) + 1;
        const double p = gamma + static_cast<double>(l) + 1.0;
        acc += coeffs[l] * (signed_abs_pow(hi - c, k, p) - signed_abs_pow(lo - c, k, p)) / p;
    }
    return acc;
}

double phi_poly_moment(const PiecewisePoly& w, const Interval& iv, double v, HurstParam H) {
    if (w.empty() || iv.length() == 0.0) return 0.0;
    const double gamma = H.two_h() - 2.0;
    const auto x = w.breakpoints();
    const auto pieces = w.pieces();
    double acc = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const double lo = std::max(iv.lo(), x[k]);
        const double hi = std::min(iv.hi(), x[k + 1]);
        acc += signed_power_moment(pieces[k], v, 0, gamma, lo, hi);
    }
    return H.kernel_constant() * acc;
}

double phi_poly_moment(const PiecewisePoly& w, double v, HurstParam H) {
    if (w.empty()) return 0.0;
    return phi_poly_moment(w, Interval(w.lo(), w.hi()), v, H);
}

double inner_product(const PiecewisePoly& f, const PiecewisePoly& g, HurstParam H) {
    if (f.empty() || g.empty()) return 0.0;
    const double gamma = H.two_h() - 2.0;
    const auto xf = f.breakpoints();
    const auto xg = g.breakpoints();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.num_pieces(); ++i) {
        const double a = xf[i], b = xf[i + 1];
        // Repeated integration by parts in s:
        //   int_a^b f(s)|s-t|^g ds = sum_j (-1)^j [f^(j)(s) K_j(s,t)]_a^b,
        //   K_j(s,t) = sgn(s-t)^{j+1}|s-t|^{g+j+1} / prod_{m=1}^{j+1}(g+m).
        Poly df = f.pieces()[i];
        double denom = 1.0;
        for (int j = 0; !df.is_zero(); ++j) {
            denom *= gamma + j + 1.0;
            const double fb = df(b), fa = df(a);
            for (std::size_t k = 0; k < g.num_pieces(); ++k) {
                const Poly& gp = g.pieces()[k];
                const double c = xg[k], d = xg[k + 1];
                const double sb = signed_power_moment(gp, b, j + 1, gamma + j + 1.0, c, d);
                const double sa = signed_power_moment(gp, a, j + 1, gamma + j + 1.0, c, d);
                // (-1)^j from the expansion times (-1)^{j+1} from flipping sgn(s-t)
                acc -= (fb * sb - fa * sa) / denom;
            }
            df = df.derivative();
        }
    }
    return H.kernel_constant() * acc;
}

}  // namespace fracexp
