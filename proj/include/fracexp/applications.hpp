#pragma once

#include "fracexp/fbm.hpp"
#include "fracexp/hurst.hpp"

#include <complex>
#include <vector>

namespace fracexp {

/// Zero-coupon bond price E[exp(int_0^T B_s ds)] under a fractional short rate.
struct MertonResult {
    double T = 0.0, H = 0.0;
    std::vector<double> partial_sums;         // explicit term formula
    std::vector<double> engine_partial_sums;  // exponential-formula engine
    double closed_form = 0.0;                 // exp(T^{2H+2} / (4H + 4))
    std::vector<double> rel_gap;              // |partial_sums - closed_form| / closed_form
};

MertonResult merton_bond_price(double T, HurstParam H, int order);

/// E[exp(-int_0^T B_s^2 ds)] ~ c0 + c1 T^{2H+1} + c2 T^{4H+2} for small T.
struct CirExpansion {
    double T = 0.0, H = 0.0;
    double c0 = 1.0, c1 = 0.0, c2 = 0.0;
    double c2_integrals = 0.0;  // c2 rebuilt from the three simplex integrals
    double approx = 1.0;
};

CirExpansion cir_small_T(double T, HurstParam H);

/// E[(int_0^1 B_s^2 ds)^3] by Isserlis' formula and Gauss-Legendre quadrature.
double cir_third_moment(HurstParam H, int nodes = 48);

struct CirMcCheck {
    double mc = 1.0;                // estimate on the refined grid
    double std_error = 0.0;
    double coarse_mc = 1.0;         // same paths, every second grid time
    double refinement_shift = 0.0;  // mc - coarse_mc
    double series = 1.0;
    double band = 0.0;                // 3 standard errors
    double truncation_budget = 0.0;   // K T^{6H+3} with K = E[X_1^3] / 6
    long n_paths = 0;
    int steps = 0;

    bool within() const;
};

/// Monte Carlo of E[exp(-int_0^T B_s^2 ds)] (trapezoid rule on a uniform grid of
/// 64 * grid_refinement * 2 steps, compared with the coarse grid on the same paths)
/// against the small-T expansion.
CirMcCheck cir_mc_check(double T, HurstParam H, const McConfig& cfg);

/// Terms n = 0..N of the (divergent) series for E[exp(iz X_T)], X_T = exp(sigma B_T + mu).
struct LognormalSeries {
    std::vector<std::complex<double>> terms;
    std::vector<std::complex<double>> partial_sums;

    std::complex<double> value() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
    std::vector<double> magnitudes() const;
};

LognormalSeries lognormal_cf_series(std::complex<double> z, double T, HurstParam H, double sigma, double mu, int N);

std::complex<double> lognormal_cf_partial(std::complex<double> z, double T, HurstParam H, double sigma, double mu,
                                          int N);

/// E[exp(p sigma B_T)] from the moment-generating reduction of the characteristic series,
/// truncated after n = N.
double lognormal_moment(int p, double T, HurstParam H, double sigma, int N);

}  // namespace fracexp
