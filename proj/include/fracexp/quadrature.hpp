#pragma once

#include <functional>
#include <vector>

namespace fracexp {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

struct QuadOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_panels = 2000;
};

using Integrand = std::function<double(double)>;

/// Single 15-point Gauss-Kronrod panel; error is |K15 - G7|.
QuadResult gauss_kronrod15(const Integrand& f, double a, double b);

/// Globally adaptive G7K15 (bisect the worst panel).
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt = {});

/// Adaptive integration with forced splits at `breaks` (points outside (a,b) ignored).
QuadResult integrate(const Integrand& f, double a, double b, std::vector<double> breaks,
                     const QuadOptions& opt = {});

/// Integral of f(u)|u-v|^alpha over [a, b], alpha > -1, with f smooth on each side of v.
/// Each side is mapped by u = v +- L s^{1/(alpha+1)} which removes the singularity.
QuadResult integrate_power_singular(const Integrand& f, double a, double b, double v, double alpha,
                                    std::vector<double> breaks = {}, const QuadOptions& opt = {});

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace fracexp
