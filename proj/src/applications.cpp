#include "fracexp/applications.hpp"

#include "fracexp/errors.hpp"
#include "fracexp/expformula.hpp"
#include "fracexp/quadrature.hpp"
#include "fracexp/special.hpp"

#include <cmath>

namespace fracexp {

namespace {

void check_T(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon T must be positive");
}

constexpr int kCirBaseSteps = 64;

}  // namespace

MertonResult merton_bond_price(double T, HurstParam H, int order) {
    check_T(T);
    if (order < 0) throw DomainError("order must be nonnegative");
    const double h = H.value();
    MertonResult out;
    out.T = T;
    out.H = h;
    const double x = std::pow(T, 2.0 * h + 2.0) / (2.0 * h + 2.0);
    out.closed_form = std::exp(0.5 * x);
    double term = 1.0, acc = 0.0;
    for (int i = 0; i <= order; ++i) {
        if (i > 0) term *= 0.5 * x / i;
        acc += term;
        out.partial_sums.push_back(acc);
        out.rel_gap.push_back(std::fabs(acc - out.closed_form) / out.closed_form);
    }
    out.engine_partial_sums = exp_series(exp(time_int(0.0, T)), 0.0, T, H, order, nullptr).partial_sums;
    return out;
}

CirExpansion cir_small_T(double T, HurstParam H) {
    check_T(T);
    const double h = H.value();
    CirExpansion out;
    out.T = T;
    out.H = h;
    out.c1 = -1.0 / (2.0 * h + 1.0);
    out.c2 = (8.0 * h * h + 18.0 * h + 5.0) / (4.0 * (2.0 * h + 1.0) * (2.0 * h + 1.0) * (4.0 * h + 1.0)) -
             beta_fn(2.0 * h + 1.0, 2.0 * h + 2.0) / (2.0 * h + 1.0);
    const auto I = cir_fourth_order_closed_form(1.0, H);
    out.c2_integrals = I[0] + I[1] + I[2];
    if (std::fabs(out.c2 - out.c2_integrals) > 1e-8 * std::fabs(out.c2))
        throw NumericalError("second CIR coefficient disagrees with its simplex integrals");
    out.approx = out.c0 + out.c1 * std::pow(T, 2.0 * h + 1.0) + out.c2 * std::pow(T, 4.0 * h + 2.0);
    return out;
}

double cir_third_moment(HurstParam H, int nodes) {
    std::vector<double> x, w;
    gauss_legendre(nodes, x, w);
    for (auto& t : x) t = 0.5 * (t + 1.0);
    for (auto& t : w) t *= 0.5;
    const auto n = x.size();
    std::vector<double> var(n);
    for (std::size_t i = 0; i < n; ++i) var[i] = covariance(x[i], x[i], H);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double cij = covariance(x[i], x[j], H);
            for (std::size_t k = 0; k < n; ++k) {
                const double cik = covariance(x[i], x[k], H), cjk = covariance(x[j], x[k], H);
                // E[X^2 Y^2 Z^2] for a centered Gaussian triple
                const double m = var[i] * var[j] * var[k] +
                                 2.0 * (var[i] * cjk * cjk + var[j] * cik * cik + var[k] * cij * cij) +
                                 8.0 * cij * cjk * cik;
                acc += w[i] * w[j] * w[k] * m;
            }
        }
    return acc;
}

bool CirMcCheck::within() const {
    return std::fabs(refinement_shift) < std_error &&
           std::fabs(mc - series) <= std::max(band, truncation_budget);
}

CirMcCheck cir_mc_check(double T, HurstParam H, const McConfig& cfg) {
    cfg.validate();
    if (!(T >= 0.0)) throw DomainError("horizon T must be nonnegative");
    CirMcCheck out;
    out.n_paths = cfg.n_paths;
    if (T == 0.0) return out;
    const double h = H.value();
    out.series = cir_small_T(T, H).approx;
    out.truncation_budget = cir_third_moment(H) / 6.0 * std::pow(T, 6.0 * h + 3.0);

    const int coarse = kCirBaseSteps * cfg.grid_refinement;
    out.steps = 2 * coarse;
    McConfig fine = cfg;
    fine.grid_refinement = 2 * coarse;
    const auto ens = simulate(TimeGrid({T}), fine, H);
    const Expr F = exp(-time_int_sq(0.0, T));
    const auto m = mc_expect(F, ens);
    const auto c = mc_expect(F, ens.subsample(2));
    out.mc = m.estimate;
    out.std_error = m.std_error;
    out.coarse_mc = c.estimate;
    out.refinement_shift = m.estimate - c.estimate;
    out.band = 3.0 * m.std_error;
    return out;
}

std::vector<double> LognormalSeries::magnitudes() const {
    std::vector<double> out;
    for (const auto& t : terms) out.push_back(std::abs(t));
    return out;
}

LognormalSeries lognormal_cf_series(std::complex<double> z, double T, HurstParam H, double sigma, double mu,
                                    int N) {
    check_T(T);
    if (N < 0) throw DomainError("truncation N must be nonnegative");
    const auto S = stirling2_table_real(2 * N);
    const double c = 0.5 * std::pow(T, H.two_h()) * sigma * sigma;
    const std::complex<double> iw = std::complex<double>(0.0, 1.0) * z * std::exp(mu);
    const std::complex<double> e = std::exp(iw);
    LognormalSeries out;
    std::complex<double> acc = 0.0;
    double cn = 1.0;  // c^n / n!
    for (int n = 0; n <= N; ++n) {
        if (n > 0) cn *= c / n;
        std::complex<double> inner = 0.0, pw = 1.0;
        for (int k = 0; k <= 2 * n; ++k) {
            const double s = S[static_cast<std::size_t>(2 * n)][static_cast<std::size_t>(k)];
            if (!std::isfinite(s)) throw OverflowError("Stirling number {" + std::to_string(2 * n) + "," +
                                                       std::to_string(k) + "} overflows double precision");
            inner += s * pw;
            pw *= iw;
        }
        const std::complex<double> term = cn * e * inner;
        out.terms.push_back(term);
        acc += term;
        out.partial_sums.push_back(acc);
    }
    return out;
}

std::complex<double> lognormal_cf_partial(std::complex<double> z, double T, HurstParam H, double sigma, double mu,
                                          int N) {
    return lognormal_cf_series(z, T, H, sigma, mu, N).value();
}

double lognormal_moment(int p, double T, HurstParam H, double sigma, int N) {
    check_T(T);
    if (p < 0) throw DomainError("moment order must be nonnegative");
    if (N < 0) throw DomainError("truncation N must be nonnegative");
    const auto S = stirling2_table_real(2 * N);
    const double c = 0.5 * std::pow(T, H.two_h()) * sigma * sigma;
    double acc = 0.0, cn = 1.0;
    for (int n = 0; n <= N; ++n) {
        if (n > 0) cn *= c / n;
        // sum_l p!/(p-l)! {2n, l}, which equals p^{2n}
        double inner = 0.0, falling = 1.0;
        for (int l = 0; l <= std::min(p, 2 * n); ++l) {
            if (l > 0) falling *= p - l + 1;
            inner += falling * S[static_cast<std::size_t>(2 * n)][static_cast<std::size_t>(l)];
        }
        acc += cn * inner;
    }
    return acc;
}

}  // namespace fracexp
