#pragma once

#include "fracexp/hurst.hpp"
#include "fracexp/poly.hpp"

namespace fracexp {

/// phi_H(u, v) = H(2H-1)|u-v|^{2H-2}. Throws DiagonalSingularity when u == v.
double phi(double u, double v, HurstParam H);

/// Closed form of the integral of phi_H(., v) over [a, b]; finite for any v.
double phi_antiderivative(double a, double b, double v, HurstParam H);

/// Exact double integral of phi_H over the rectangle u_iv x v_iv.
double rect_integral(const Interval& u_iv, const Interval& v_iv, HurstParam H);

/// Exact integral of w(u) phi_H(u, v) over iv.
double phi_poly_moment(const PiecewisePoly& w, const Interval& iv, double v, HurstParam H);
/// Same, over the whole support of w.
double phi_poly_moment(const PiecewisePoly& w, double v, HurstParam H);

/// <f, g>_H = double integral of f(s) g(t) phi_H(s, t).
double inner_product(const PiecewisePoly& f, const PiecewisePoly& g, HurstParam H);

/// Integral of P(t) sgn(t-c)^m |t-c|^gamma over [lo, hi], gamma > -1.
double signed_power_moment(const Poly& P, double c, int m, double gamma, double lo, double hi);

}  // namespace fracexp
