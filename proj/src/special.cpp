#include "fracexp/special.hpp"

#include "fracexp/errors.hpp"

#include <cmath>
#include <string>

namespace fracexp {

HermiteTable::HermiteTable(int max_degree) {
    if (max_degree < 0) throw DomainError("HermiteTable: negative degree");
    rows_.push_back({1.0});
    if (max_degree >= 1) rows_.push_back({0.0, 1.0});
    for (int n = 2; n <= max_degree; ++n) {
        const auto& p1 = rows_[static_cast<std::size_t>(n - 1)];
        const auto& p2 = rows_[static_cast<std::size_t>(n - 2)];
        std::vector<double> r(static_cast<std::size_t>(n) + 1, 0.0);
        for (std::size_t k = 0; k < p1.size(); ++k) r[k + 1] += p1[k];
        for (std::size_t k = 0; k < p2.size(); ++k) r[k] -= (n - 1) * p2[k];
        rows_.push_back(std::move(r));
    }
}

double HermiteTable::eval(int n, double x) const {
    const auto& c = row(n);
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double hermite_eval(int n, double x) { return scaled_hermite(n, x, 1.0); }

double scaled_hermite(int n, double x, double var) {
    if (n < 0) throw DomainError("Hermite degree must be nonnegative");
    if (n == 0) return 1.0;
    double h0 = 1.0, h1 = x;
    for (int k = 2; k <= n; ++k) {
        const double h2 = x * h1 - (k - 1) * var * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double hermite_generating_check(double t, double x, int N) {
    double sum = 0.0, tn = 1.0;
    double h0 = 1.0, h1 = x;
    for (int n = 0; n <= N; ++n) {
        const double hn = (n == 0) ? h0 : h1;
        sum += tn * hn;
        tn *= t / (n + 1);
        if (n >= 1) {
            const double h2 = x * h1 - n * h0;
            h0 = h1;
            h1 = h2;
        }
    }
    return std::fabs(std::exp(t * x - 0.5 * t * t) - sum);
}

double hermite_shift_identity_gap(int l, double x, double y) {
    double lhs = 0.0, xk = 1.0;
    for (int k = 0; k <= l; ++k) {
        lhs += binomial(l, k) * xk * hermite_eval(l - k, y);
        xk *= x;
    }
    return std::fabs(lhs - hermite_eval(l, x + y));
}

StirlingTable::StirlingTable(int max_j) {
    if (max_j < 0) throw DomainError("StirlingTable: negative size");
    const auto n = static_cast<std::size_t>(max_j) + 1;
    b_.assign(n, {});
    ok_.assign(n, {});
    for (std::size_t j = 0; j < n; ++j) {
        b_[j].assign(j + 1, 0);
        ok_[j].assign(j + 1, true);
    }
    b_[0][0] = 1;
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t k = 1; k <= j; ++k) {
            const std::uint64_t prev = (k <= j - 1) ? b_[j - 1][k] : 0;
            const bool prev_ok = (k <= j - 1) ? ok_[j - 1][k] : true;
            const std::uint64_t diag = b_[j - 1][k - 1];
            std::uint64_t prod = 0, sum = 0;
            bool ok = prev_ok && ok_[j - 1][k - 1];
            ok = ok && !__builtin_mul_overflow(static_cast<std::uint64_t>(k), prev, &prod);
            ok = ok && !__builtin_add_overflow(prod, diag, &sum);
            b_[j][k] = ok ? sum : 0;
            ok_[j][k] = ok;
        }
    }
}

bool StirlingTable::fits(int j, int k) const {
    if (j < 0 || k < 0) throw DomainError("Stirling indices must be nonnegative");
    if (j > max_j()) throw DomainError("Stirling index beyond table size");
    if (k > j) return true;
    return ok_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
}

std::uint64_t StirlingTable::at(int j, int k) const {
    if (!fits(j, k))
        throw OverflowError("Stirling number {" + std::to_string(j) + "," + std::to_string(k) +
                            "} exceeds 64-bit range");
    if (k > j) return 0;
    return b_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
}

std::uint64_t stirling2(int j, int k) {
    if (j < 0 || k < 0) throw DomainError("Stirling indices must be nonnegative");
    if (k > j) return 0;
    return StirlingTable(j).at(j, k);
}

std::uint64_t stirling_falling_sum(int p, int n) {
    if (p < 0 || n < 0) throw DomainError("stirling_falling_sum: negative argument");
    const StirlingTable tab(2 * n);
    std::uint64_t acc = 0, falling = 1;  // p!/(p-l)!
    for (int l = 0; l <= p; ++l) {
        if (l > 0 && __builtin_mul_overflow(falling, static_cast<std::uint64_t>(p - l + 1), &falling))
            throw OverflowError("stirling_falling_sum: falling factorial overflow");
        if (l > 2 * n) break;
        std::uint64_t term = 0;
        if (__builtin_mul_overflow(falling, tab.at(2 * n, l), &term) || __builtin_add_overflow(acc, term, &acc))
            throw OverflowError("stirling_falling_sum: overflow");
    }
    return acc;
}

std::vector<std::vector<double>> stirling2_table_real(int max_j) {
    std::vector<std::vector<double>> b(static_cast<std::size_t>(max_j) + 1);
    for (std::size_t j = 0; j < b.size(); ++j) b[j].assign(j + 1, 0.0);
    b[0][0] = 1.0;
    for (std::size_t j = 1; j < b.size(); ++j)
        for (std::size_t k = 1; k <= j; ++k)
            b[j][k] = static_cast<double>(k) * (k <= j - 1 ? b[j - 1][k] : 0.0) + b[j - 1][k - 1];
    return b;
}

double beta_fn(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("beta_fn requires positive arguments");
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

double factorial(int n) {
    if (n < 0) throw DomainError("factorial of negative integer");
    return std::tgamma(n + 1.0);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

std::vector<std::vector<int>> compositions(int total, int parts) {
    std::vector<std::vector<int>> out;
    if (parts <= 0) {
        if (total == 0) out.emplace_back();
        return out;
    }
    std::vector<int> cur(static_cast<std::size_t>(parts), 0);
    auto rec = [&](auto&& self, int idx, int left) -> void {
        if (idx == parts - 1) {
            cur[static_cast<std::size_t>(idx)] = left;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[static_cast<std::size_t>(idx)] = v;
            self(self, idx + 1, left - v);
        }
    };
    rec(rec, 0, total);
    return out;
}

}  // namespace fracexp
