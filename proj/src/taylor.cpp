#include "fracexp/taylor.hpp"

#include "fracexp/errors.hpp"
#include "fracexp/fbm.hpp"
#include "fracexp/kernel.hpp"
#include "fracexp/special.hpp"

#include <algorithm>
#include <cmath>

namespace fracexp {

void SeriesResult::push(double term) {
    terms.push_back(term);
    partial_sums.push_back((partial_sums.empty() ? 0.0 : partial_sums.back()) + term);
    order = static_cast<int>(terms.size()) - 1;
}

int locate_segment(double r, const TimeGrid& grid) {
    if (!(r >= 0.0) || r > grid.T()) throw DomainError("r must lie in [0, T]");
    for (int i = 1; i <= grid.J(); ++i)
        if (r <= grid.t(i)) return i;
    return grid.J();
}

Expr psi(const Expr& F, const PsiSpec& spec, const TimeGrid& grid, HurstParam H) {
    if (spec.k < 0) throw DomainError("psi order must be nonnegative");
    if (spec.j < 1 || spec.j > grid.J()) throw DomainError("psi: segment index out of range");
    if (spec.r < grid.t(spec.j - 1) || spec.r > grid.t(spec.j))
        throw DomainError("psi: r must lie in [t_{j-1}, t_j]");
    if (spec.k == 0) return F;
    const int J = grid.J();
    // rect_integral(cell_i, [r, t_j]) is half the bracket, absorbing the 2^{-k}
    std::vector<double> half(static_cast<std::size_t>(J));
    for (int i = 1; i <= J; ++i)
        half[static_cast<std::size_t>(i - 1)] =
            rect_integral(Interval(grid.t(i - 1), grid.t(i)), Interval(spec.r, grid.t(spec.j)), H);
    std::vector<Expr> terms;
    for (const auto& q : compositions(spec.k, J)) {
        double w = 1.0;
        for (int i = 0; i < J; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            w *= std::pow(half[ui], q[ui]) / factorial(q[ui]);
        }
        if (w == 0.0) continue;
        Expr d = directional_partials(F, grid, q);
        if (d.is_const(0.0)) continue;
        terms.push_back(product({constant(w), d}));
    }
    return sum(std::move(terms));
}

namespace {

struct Segment {
    double lo, hi;
    int cell;  // grid index j of the segment's right end
};

std::vector<Segment> segments(double r, const TimeGrid& grid) {
    const int Ir = locate_segment(r, grid);
    std::vector<Segment> segs;
    for (int j = Ir; j <= grid.J(); ++j) {
        const double lo = (j == Ir) ? r : grid.t(j - 1);
        if (j == Ir && lo == grid.t(j)) continue;  // degenerate first segment
        segs.push_back({lo, grid.t(j), j});
    }
    return segs;
}

}  // namespace

std::vector<Expr> backward_taylor_terms(const Expr& F, double r, const TimeGrid& grid, int order, HurstParam H) {
    if (order < 0) throw DomainError("order must be nonnegative");
    if (!is_discrete(F, grid.times()))
        throw DomainError("backward Taylor expansion needs a discrete functional of the grid samples");
    const auto segs = segments(r, grid);
    const auto ns = segs.size();
    std::vector<Expr> out;
    for (int l = 0; l <= order; ++l) {
        std::vector<Expr> acc;
        for (const auto& qs : compositions(l, static_cast<int>(ns))) {
            std::vector<int> q(static_cast<std::size_t>(grid.J()), 0);
            for (std::size_t k = 0; k < ns; ++k) q[static_cast<std::size_t>(segs[k].cell - 1)] = qs[k];
            const Expr G = directional_partials(F, grid, q);
            if (G.is_const(0.0)) continue;
            // all i with i_k <= q_k; nest from the last segment outward
            std::vector<int> i(ns, 0);
            for (;;) {
                Expr X = G;
                for (std::size_t k = ns; k-- > 0;) {
                    const auto& s = segs[k];
                    const int n = qs[k] - i[k];
                    const double var = std::pow(s.hi - s.lo, H.two_h());
                    const Expr h = hermite(n, sample(s.hi) - sample(s.lo), var);
                    const double c = ((i[k] % 2) ? -1.0 : 1.0) / factorial(n);
                    X = product({constant(c), h, psi(X, PsiSpec{s.lo, s.cell, i[k]}, grid, H)});
                    if (X.is_const(0.0)) break;
                }
                if (!X.is_const(0.0)) acc.push_back(X);
                std::size_t k = 0;
                while (k < ns && i[k] == qs[k]) i[k++] = 0;
                if (k == ns) break;
                ++i[k];
            }
        }
        Expr term = sum(std::move(acc));
        out.push_back((l % 2) ? -term : term);
    }
    return out;
}

SeriesResult evaluate_series(const std::vector<Expr>& terms, const PathView& path, const Bindings& b) {
    SeriesResult res;
    for (const auto& t : terms) res.push(eval(t, b, path));
    return res;
}

SeriesResult backward_taylor(const Expr& F, double r, const TimeGrid& grid, int order, HurstParam H,
                             const PathView& path) {
    return evaluate_series(backward_taylor_terms(F, r, grid, order, H), path);
}

long taylor_term_count(double r, const TimeGrid& grid, int l) {
    const auto segs = segments(r, grid);
    long count = 0;
    for (const auto& q : compositions(l, static_cast<int>(segs.size()))) {
        long c = 1;
        for (int x : q) c *= x + 1;
        count += c;
    }
    return count;
}

SupEstimator mc_sup_estimator(const Expr& F, const TimeGrid& grid, HurstParam H, long n_paths,
                              unsigned long long seed) {
    McConfig cfg;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    auto ens = std::make_shared<FbmEnsemble>(simulate(grid, cfg, H));
    return [F, grid, ens](int m) {
        std::vector<Expr> ds;
        for (const auto& w : compositions(m, grid.J())) ds.push_back(directional_partials(F, grid, w));
        double acc = 0.0;
        for (long p = 0; p < ens->n_paths(); ++p) {
            const PathView pv = ens->path(p);
            double mx = 0.0;
            for (const auto& d : ds) mx = std::max(mx, std::fabs(eval(d, {}, pv)));
            acc += mx * mx;
        }
        return std::sqrt(acc / static_cast<double>(ens->n_paths()));
    };
}

std::vector<double> assumption_a_sequence(const Expr& F, double r, const TimeGrid& grid, HurstParam H, int N_max,
                                          const SupEstimator& sup) {
    (void)F;
    const double T = grid.T();
    const double p = H.two_h();
    const double c1 = std::pow(T, p) - std::pow(r, p) + std::pow(T - r, p);
    const double c2 = std::pow(T - r, H.value());
    const int J = grid.J();
    std::vector<double> out;
    for (int N = 1; N <= N_max; ++N) {
        double acc = 0.0;
        for (int i = 0; i <= N; ++i) {
            const double s = sup(2 * N - i);
            if (s == 0.0) continue;
            // (i!)^{1/2} (N+J-1)! / (2^{N-i} (N!)^2) in logs
            const double lw = 0.5 * std::lgamma(i + 1.0) + std::lgamma(N + J + 0.0) - (N - i) * std::log(2.0) -
                              2.0 * std::lgamma(N + 1.0);
            const double b = binomial(N, i);
            acc += s * b * b * std::exp(lw) * std::pow(c1, N - i) * std::pow(c2, i);
        }
        out.push_back(acc);
    }
    return out;
}

double exp_sample_tail_bound(double sigma, double r, double T, HurstParam H, double BT, double Br, int N) {
    const double d = std::pow(T - r, H.value());
    if (d == 0.0) return 0.0;
    const double c = rect_integral(Interval(0.0, T), Interval(r, T), H);
    const double z = (BT - Br - sigma * c) / d;
    // |h_l(z)| <= 1.0865 sqrt(l!) e^{z^2/4}
    const double pref = std::exp(sigma * BT) * 1.0865 * std::exp(0.25 * z * z);
    const double a = std::fabs(sigma) * d;
    double tail = 0.0;
    double lterm = (N + 1) * std::log(a) - 0.5 * std::lgamma(N + 2.0);
    for (int l = N + 1; l < N + 2000; ++l) {
        const double t = std::exp(lterm);
        tail += t;
        if (t < 1e-30 * tail && a * a < l + 1) break;
        lterm += std::log(a) - 0.5 * std::log(l + 1.0);
    }
    return pref * tail;
}

}  // namespace fracexp
