#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracexp/errors.hpp"
#include "fracexp/special.hpp"
#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace fracexp;

TEST_CASE("hermite basics") {
    CHECK(hermite_eval(0, 3.7) == 1.0);
    CHECK(hermite_eval(2, 1.7) == doctest::Approx(1.7 * 1.7 - 1.0));
    // h_5 from differentiating e^{-x^2/2}: x^5 - 10x^3 + 15x
    const double x = 1.3;
    CHECK(hermite_eval(5, x) == doctest::Approx(std::pow(x, 5) - 10 * std::pow(x, 3) + 15 * x).epsilon(1e-14));
    CHECK(scaled_hermite(3, 0.4, 0.0) == doctest::Approx(0.064));
    CHECK(scaled_hermite(4, 0.6, 2.5) == doctest::Approx(std::pow(2.5, 2) * hermite_eval(4, 0.6 / std::sqrt(2.5))));
}

TEST_CASE("hermite table recurrence") {
    HermiteTable tab(20);
    CHECK(tab.row(0) == std::vector<double>{1.0});
    CHECK(tab.row(1) == std::vector<double>{0.0, 1.0});
    for (int n = 2; n <= 20; ++n) {
        const auto& r = tab.row(n);
        const auto& a = tab.row(n - 1);
        const auto& b = tab.row(n - 2);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double xa = k >= 1 ? a[k - 1] : 0.0;
            const double xb = k < b.size() ? b[k] : 0.0;
            CHECK(r[k] == xa - (n - 1) * xb);
        }
        CHECK(tab.eval(n, 0.77) == doctest::Approx(hermite_eval(n, 0.77)).epsilon(1e-12));
    }
}

TEST_CASE("hermite generating function") {
    CHECK(hermite_generating_check(0.0, 5.0, 0) == 0.0);
    CHECK(hermite_generating_check(0.5, 1.0, 30) < 1e-12);
    CHECK(hermite_generating_check(1.0, 2.0, 5) > hermite_generating_check(1.0, 2.0, 20));
    for (double t : {-2.0, -0.7, 1.1, 2.0})
        for (double x : {-3.0, 0.0, 1.5, 3.0}) {
            double prev = hermite_generating_check(t, x, 5);
            CHECK(hermite_generating_check(t, x, 60) < 1e-10);
            CHECK(hermite_generating_check(t, x, 40) <= prev);
        }
}

TEST_CASE("hermite shift identity") {
    CHECK(hermite_shift_identity_gap(0, 0.3, 0.9) == 0.0);
    CHECK(hermite_shift_identity_gap(1, 0.3, 0.9) == 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int l = 0; l <= 20; ++l)
        for (int n = 0; n < 5; ++n) {
            const double x = U(rng), y = U(rng);
            CHECK(hermite_shift_identity_gap(l, x, y) <= 1e-10 * (1.0 + std::fabs(hermite_eval(l, x + y))));
        }
}

namespace {
// number of set partitions of {0..j-1} into exactly k blocks
std::uint64_t brute_partitions(int j, int k) {
    std::vector<int> block(static_cast<std::size_t>(j), 0);
    std::uint64_t count = 0;
    std::function<void(int, int)> rec = [&](int i, int used) {
        if (i == j) {
            if (used == k) ++count;
            return;
        }
        for (int b = 0; b <= used && b < k; ++b) {
            block[static_cast<std::size_t>(i)] = b;
            rec(i + 1, b == used ? used + 1 : used);
        }
    };
    rec(0, 0);
    return count;
}
}  // namespace

TEST_CASE("stirling numbers") {
    CHECK(stirling2(0, 0) == 1);
    CHECK(stirling2(3, 2) == 3);
    CHECK(stirling2(4, 2) == 7);
    for (int j = 0; j <= 8; ++j)
        for (int k = 0; k <= j; ++k) CHECK(stirling2(j, k) == brute_partitions(j, k));
    CHECK_THROWS_AS(stirling2(40, 20), OverflowError);
}

TEST_CASE("stirling falling sum") {
    CHECK(stirling_falling_sum(1, 3) == 1);
    CHECK(stirling_falling_sum(2, 1) == 4);
    CHECK(stirling_falling_sum(3, 2) == 81);
    for (int p = 0; p <= 6; ++p)
        for (int n = 0; n <= 6; ++n) {
            std::uint64_t pw = 1;
            for (int i = 0; i < 2 * n; ++i) pw *= static_cast<std::uint64_t>(p);
            CHECK(stirling_falling_sum(p, n) == pw);
        }
}

TEST_CASE("beta function") {
    CHECK(beta_fn(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(beta_fn(2, 3) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(beta_fn(2.3, 0.7) == doctest::Approx(beta_fn(0.7, 2.3)).epsilon(1e-15));
    auto f = [](double t) { return std::pow(t, 1.5) * std::pow(1 - t, 2.5); };
    const double q = integrate(f, 0, 1, oracle::tight()).value;
    CHECK(oracle::rel_err(beta_fn(2.5, 3.5), q) < 1e-10);
    CHECK_THROWS_AS(beta_fn(0.0, 1.0), DomainError);
}

TEST_CASE("compositions") {
    auto c = compositions(3, 2);
    CHECK(c.size() == 4);
    CHECK(c.front() == std::vector<int>{0, 3});
    CHECK(compositions(0, 3).size() == 1);
    CHECK(compositions(5, 3).size() == 21);
}
