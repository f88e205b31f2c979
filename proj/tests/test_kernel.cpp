#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracexp/kernel.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace fracexp;
using oracle::rel_err;

TEST_CASE("phi values and diagonal") {
    CHECK(phi(0, 1, HurstParam(0.75)) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK_THROWS_AS(phi(2, 2, HurstParam(0.6)), DiagonalSingularity);
    CHECK(phi(1, 3, HurstParam(0.6)) == phi(3, 1, HurstParam(0.6)));
}

TEST_CASE("hurst validation") {
    CHECK_THROWS_AS(HurstParam(0.5), DomainError);
    CHECK_THROWS_AS(HurstParam(1.0), DomainError);
    CHECK_THROWS_AS(Interval(1.0, 0.5), DomainError);
    CHECK_NOTHROW(HurstParam(0.51));
}

TEST_CASE("phi_antiderivative") {
    HurstParam H(0.7);
    const double T = 1.3;
    CHECK(rel_err(phi_antiderivative(0, T, 0, H), 0.7 * std::pow(T, 0.4)) < 1e-14);
    CHECK(phi_antiderivative(0.4, 0.4, 0.2, H) == 0.0);
    HurstParam H2(0.75);
    const double q = oracle::phi_moment(PiecewisePoly::indicator(0, 1), 0, 1, 0.5, H2);
    CHECK(rel_err(phi_antiderivative(0, 1, 0.5, H2), q) < 1e-10);
}

TEST_CASE("rect_integral") {
    HurstParam H(0.8);
    const double T = 1.7;
    CHECK(rel_err(rect_integral({0, T}, {0, T}, H), std::pow(T, 1.6)) < 1e-14);
    CHECK(rel_err(rect_integral({0, 1}, {2, 3}, H), oracle::rect(0, 1, 2, 3, H)) < 1e-10);
    // partial-cell bracket form
    const double t0 = 0.2, t1 = 0.5, r = 0.6, tj = 0.9, p = 1.6;
    const double bracket = std::pow(tj - t0, p) - std::pow(tj - t1, p) + std::pow(std::fabs(t1 - r), p) -
                           std::pow(r - t0, p);
    CHECK(rel_err(2.0 * rect_integral({t0, t1}, {r, tj}, H), bracket) < 1e-14);
}

TEST_CASE("rect additivity and symmetry") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 2.0), Hd(0.55, 0.95);
    for (int n = 0; n < 100; ++n) {
        HurstParam H(Hd(rng));
        double x[4] = {U(rng), U(rng), U(rng), U(rng)};
        std::sort(x, x + 2);
        std::sort(x + 2, x + 4);
        const double a = x[0], b = x[1], c = x[2], d = x[3];
        const double m = a + (b - a) * 0.37, n2 = c + (d - c) * 0.81;
        const double whole = rect_integral({a, b}, {c, d}, H);
        const double parts = rect_integral({a, m}, {c, n2}, H) + rect_integral({m, b}, {c, n2}, H) +
                             rect_integral({a, m}, {n2, d}, H) + rect_integral({m, b}, {n2, d}, H);
        CHECK(std::fabs(whole - parts) <= 1e-12 * std::max(1.0, std::fabs(whole)));
        CHECK(rect_integral({a, b}, {c, d}, H) == doctest::Approx(rect_integral({c, d}, {a, b}, H)).epsilon(1e-14));
    }
}

TEST_CASE("phi_poly_moment") {
    HurstParam H(0.65);
    const auto one = PiecewisePoly::indicator(0.3, 1.1);
    CHECK(rel_err(phi_poly_moment(one, {0.3, 1.1}, 0.7, H), phi_antiderivative(0.3, 1.1, 0.7, H)) < 1e-13);

    HurstParam H7(0.7);
    const auto w = PiecewisePoly::on(0, 1, Poly{0, 1});
    CHECK(rel_err(phi_poly_moment(w, {0, 1}, 2.0, H7), oracle::phi_moment(w, 0, 1, 2.0, H7)) < 1e-10);

    // (T-u) against (T-v) over [0,T]^2 gives T^{2H+2}/(2H+2)
    const double T = 1.4;
    HurstParam H75(0.75);
    const auto ramp = PiecewisePoly::on(0, T, Poly{T, -1});
    CHECK(rel_err(inner_product(ramp, ramp, H75), std::pow(T, 3.5) / 3.5) < 1e-13);
}

TEST_CASE("inner_product") {
    HurstParam H(0.6);
    const double T = 2.0, s = 0.7, t = 1.6;
    CHECK(rel_err(inner_product(PiecewisePoly::indicator(0, T), PiecewisePoly::indicator(0, T), H),
                  std::pow(T, 1.2)) < 1e-14);
    const double cov = 0.5 * (std::pow(s, 1.2) + std::pow(t, 1.2) - std::pow(t - s, 1.2));
    CHECK(rel_err(inner_product(PiecewisePoly::indicator(0, s), PiecewisePoly::indicator(0, t), H), cov) <
          1e-14);

    HurstParam H75(0.75);
    const auto u = PiecewisePoly::on(0, 1, Poly{0, 1});
    CHECK(rel_err(inner_product(u, u, H75), oracle::inner(u, u, H75)) < 1e-9);
}

TEST_CASE("inner_product randomized: symmetry, positivity, oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.5), C(-1.0, 1.0), Hd(0.55, 0.95);
    auto random_pw = [&]() {
        std::vector<double> x{U(rng), U(rng), U(rng)};
        std::sort(x.begin(), x.end());
        std::vector<Poly> p;
        for (int k = 0; k < 2; ++k) p.push_back(Poly{C(rng), C(rng), C(rng)});
        return PiecewisePoly(x, p);
    };
    for (int n = 0; n < 20; ++n) {
        HurstParam H(Hd(rng));
        const auto f = random_pw(), g = random_pw();
        const double fg = inner_product(f, g, H), gf = inner_product(g, f, H);
        CHECK(std::fabs(fg - gf) <= 1e-12 * std::max(1.0, std::fabs(fg)));
        CHECK(inner_product(f, f, H) > 0.0);
        CHECK(std::fabs(fg - oracle::inner(f, g, H)) <= 1e-9 * std::max(std::fabs(fg), 1e-3));
    }
}
