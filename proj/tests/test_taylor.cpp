#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracexp/errors.hpp"
#include "fracexp/fbm.hpp"
#include "fracexp/kernel.hpp"
#include "fracexp/special.hpp"
#include "fracexp/taylor.hpp"

#include <algorithm>
#include <cmath>

using namespace fracexp;

namespace {

// E[B_t^2 B_T | F_r] for r <= t
double cubic_early(double Br, double r, double t, double T, double H) {
    const double p = 2 * H;
    return Br * Br * Br + Br * (std::pow(T, p) + 2 * std::pow(t, p) - 3 * std::pow(r, p) - std::pow(T - t, p));
}

// same for r > t
double cubic_late(double Br, double Bt, double r, double t, double T, double H) {
    const double p = 2 * H;
    return Br * Bt * Bt + Bt * (std::pow(T, p) - std::pow(r, p) - std::pow(T - t, p) + std::pow(r - t, p));
}

FbmEnsemble paths_with(const std::vector<double>& times, double H, long n, std::uint64_t seed) {
    McConfig cfg;
    cfg.n_paths = n;
    cfg.seed = seed;
    std::vector<double> ts = times;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    ts.erase(std::remove(ts.begin(), ts.end(), 0.0), ts.end());
    return simulate(TimeGrid(ts), cfg, HurstParam(H));
}

}  // namespace

TEST_CASE("locate_segment") {
    TimeGrid g({0.3, 0.6, 1.0});
    CHECK(locate_segment(0.0, g) == 1);
    CHECK(locate_segment(0.3, g) == 1);
    CHECK(locate_segment(0.6, g) == 2);
    CHECK(locate_segment(0.61, g) == 3);
    CHECK(locate_segment(1.0, g) == 3);
    CHECK_THROWS_AS(locate_segment(1.1, g), DomainError);
}

TEST_CASE("psi") {
    HurstParam H(0.7);
    TimeGrid one({1.0});
    const double sigma = 0.5, r = 0.3, T = 1.0;
    Expr F = exp(constant(sigma) * sample(T));
    CHECK(to_sexpr(psi(F, {r, 1, 0}, one, H)) == to_sexpr(F));
    const double c = 0.5 * (std::pow(T, 1.4) + std::pow(T - r, 1.4) - std::pow(r, 1.4));
    std::vector<double> t{0.0, 1.0}, x{0.0, 0.8};
    PathView p{t, x};
    for (int k = 0; k <= 6; ++k)
        for (int l = 0; l <= 3; ++l) {
            Expr DlF = grid_partials(F, one, {l});
            const double want = std::pow(c, k) / factorial(k) * std::pow(sigma, k + l) * std::exp(sigma * 0.8);
            CHECK(eval(psi(DlF, {r, 1, k}, one, H), {}, p) == doctest::Approx(want).epsilon(1e-13));
        }
    // two-cell grid, first order: bracket/2 times D_{t_i}
    TimeGrid g({0.5, 1.0});
    Expr G = power(sample(0.5), 2) * sample(1.0);
    const double rr = 0.7;
    Expr P1 = psi(grid_partials(G, g, {0, 1}), {rr, 2, 1}, g, H);
    const double c1 = rect_integral({0, 0.5}, {rr, 1.0}, H), c2 = rect_integral({0.5, 1.0}, {rr, 1.0}, H);
    std::vector<double> t2{0.0, 0.5, 1.0}, x2{0.0, 0.4, -0.3};
    // D_T G = B_t^2, D_{t1} B_t^2 = 2 B_t, D_{t2} B_t^2 = 0
    CHECK(eval(P1, {}, PathView{t2, x2}) == doctest::Approx(c1 * 2 * 0.4 + c2 * 0).epsilon(1e-14));
}

TEST_CASE("backward Taylor closed forms") {
    for (double H : {0.6, 0.8}) {
        const double t = 0.5, T = 1.0;
        TimeGrid g({t, T});
        Expr F = power(sample(t), 2) * sample(T);
        for (double r : {0.0, 0.2, 0.5, 0.7, 1.0}) {
            auto terms = backward_taylor_terms(F, r, g, 6, HurstParam(H));
            auto ens = paths_with({r, t, T}, H, 50, 7);
            for (long p = 0; p < ens.n_paths(); ++p) {
                auto pv = ens.path(p);
                auto res = evaluate_series(terms, pv);
                const double want = r <= t ? cubic_early(pv.at(r), r, t, T, H) : cubic_late(pv.at(r), pv.at(t), r, t, T, H);
                CHECK(std::fabs(res.value() - want) <= 1e-10 * std::max(1.0, std::fabs(want)));
                // terminates: terms beyond degree 3 vanish
                CHECK(res.terms[4] == 0.0);
            }
        }
    }
}

TEST_CASE("backward Taylor exponential") {
    const double sigma = 0.5, T = 1.0;
    HurstParam H(0.7);
    TimeGrid one({T});
    Expr F = exp(constant(sigma) * sample(T));
    for (double r : {0.0, 0.4, 0.9}) {
        auto terms = backward_taylor_terms(F, r, one, 30, H);
        auto ens = paths_with({r, T}, 0.7, 20, 3);
        const double c = rect_integral({0, T}, {r, T}, H);
        const double d = std::pow(T - r, 0.7);
        for (long p = 0; p < ens.n_paths(); ++p) {
            auto pv = ens.path(p);
            auto res = evaluate_series(terms, pv);
            const double Br = r > 0 ? pv.at(r) : 0.0, BT = pv.at(T);
            const double want = std::exp(sigma * Br + sigma * sigma * (std::pow(T, 1.4) - std::pow(r, 1.4)) / 2);
            CHECK(std::fabs(res.value() - want) <= 1e-12 * want);
            // each term collapses to e^{sigma B_T} (-sigma d)^l / l! h_l(z)
            const double z = (BT - Br - sigma * c) / d;
            for (int l = 0; l <= 30; l += 5) {
                const double collapsed =
                    std::exp(sigma * BT) * std::pow(-sigma * d, l) / factorial(l) * hermite_eval(l, z);
                CHECK(std::fabs(res.terms[static_cast<std::size_t>(l)] - collapsed) <= 1e-12 * want);
            }
            CHECK(exp_sample_tail_bound(sigma, r, T, H, BT, Br, 30) < 1e-8 * want);
            CHECK(std::fabs(res.partial_sums[10] - want) <= exp_sample_tail_bound(sigma, r, T, H, BT, Br, 10));
        }
    }
}

TEST_CASE("property: B(T) gives B(r)") {
    TimeGrid g({0.3, 1.0});
    for (double r : {0.0, 0.1, 0.3, 0.6}) {
        auto ens = paths_with({r, 0.3, 1.0}, 0.65, 5, 1);
        for (long p = 0; p < ens.n_paths(); ++p) {
            auto pv = ens.path(p);
            auto res = backward_taylor(sample(1.0), r, g, 1, HurstParam(0.65), pv);
            CHECK(res.value() == doctest::Approx(r > 0 ? pv.at(r) : 0.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("property: depends only on the path up to r") {
    const double t = 0.5, T = 1.0, r = 0.3;
    TimeGrid g({t, T});
    Expr F = power(sample(t), 2) * sample(T) + power(sample(T), 2);
    auto terms = backward_taylor_terms(F, r, g, 5, HurstParam(0.75));
    std::vector<double> ts{0.0, r, t, T}, xs{0.0, 0.3, -0.2, 0.9};
    const double base = evaluate_series(terms, PathView{ts, xs}).value();
    for (double dt : {0.5, -1.0, 2.0}) {
        auto ys = xs;
        ys[2] += dt;
        ys[3] -= 0.7 * dt;
        CHECK(std::fabs(evaluate_series(terms, PathView{ts, ys}).value() - base) <= 1e-12 * std::max(1.0, std::fabs(base)));
    }
}

TEST_CASE("property: tower") {
    // expanding at s, then expanding that closed form at r <= t, equals expanding F at r
    const double t = 0.4, s = 0.7, T = 1.0, r = 0.25;
    HurstParam H(0.8);
    Expr F = power(sample(t), 2) * sample(T);
    TimeGrid g({t, T});
    std::vector<Expr> at_s = backward_taylor_terms(F, s, g, 4, H);
    Expr Fs = sum(at_s);
    TimeGrid g2({t, s, T});
    auto direct = backward_taylor_terms(F, r, g2, 4, H);
    auto nested = backward_taylor_terms(Fs, r, g2, 4, H);
    auto ens = paths_with({r, t, s, T}, 0.8, 20, 5);
    for (long p = 0; p < ens.n_paths(); ++p) {
        auto pv = ens.path(p);
        const double a = evaluate_series(direct, pv).value(), b = evaluate_series(nested, pv).value();
        CHECK(std::fabs(a - b) <= 1e-10 * std::max(1.0, std::fabs(a)));
    }
}

TEST_CASE("property: expectation at r = 0") {
    const double t = 0.5, T = 1.0;
    HurstParam H(0.7);
    TimeGrid g({t, T});
    Expr F = power(sample(t), 2) * power(sample(T), 2);
    auto terms = backward_taylor_terms(F, 0.0, g, 6, H);
    std::vector<double> ts{0.0, t, T}, xs{0.0, 0.4, -1.1};
    const double series = evaluate_series(terms, PathView{ts, xs}).value();
    McConfig cfg;
    cfg.n_paths = 200000;
    auto mc = mc_expect(F, cfg, H);
    CHECK(std::fabs(series - mc.estimate) < 4 * mc.std_error);
    // E[B_t^2 B_T^2] = var_t var_T + 2 cov^2
    const double exact = covariance(t, t, H) * covariance(T, T, H) + 2 * std::pow(covariance(t, T, H), 2);
    CHECK(series == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("assumption A sequence") {
    TimeGrid g({0.5, 1.0});
    HurstParam H(0.7);
    Expr F = power(sample(0.5), 2) * sample(1.0);
    auto sup = mc_sup_estimator(F, g, H, 200, 1);
    auto seq = assumption_a_sequence(F, 0.2, g, H, 4, sup);
    CHECK(seq.size() == 4);
    CHECK(seq[2] > 0.0);  // N = 3, i = 3 hits the constant third derivative
    CHECK(seq[3] == 0.0);
    TimeGrid one({1.0});
    const double sigma = 0.5;
    // closed form sup norm: sigma^m e^{sigma^2 T^{2H}}
    SupEstimator closed = [&](int m) { return std::pow(sigma, m) * std::exp(sigma * sigma); };
    auto ex = assumption_a_sequence(exp(constant(sigma) * sample(1.0)), 0.3, one, H, 40, closed);
    CHECK(ex.back() < 1e-6);
    CHECK(ex.back() < ex.front());
    CHECK(assumption_a_sequence(F, 0.2, g, H, 0, sup).empty());
}

TEST_CASE("term count") {
    TimeGrid g({0.5, 1.0});
    CHECK(taylor_term_count(0.2, g, 0) == 1);
    CHECK(taylor_term_count(0.2, g, 2) == 3 + 2 * 2 + 3);
    CHECK(taylor_term_count(1.0, g, 2) == 0);
}
