#include "fracexp/fbm.hpp"

#include "fracexp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace fracexp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Neumaier compensated sum
struct KahanSum {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) c += (sum - t) + x;
        else c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

}  // namespace

void McConfig::validate() const {
    if (n_paths < 1) throw DomainError("Monte Carlo needs at least one path");
    if (grid_refinement < 1) throw DomainError("grid refinement must be at least 1");
}

PathView FbmEnsemble::path(long p) const {
    const auto n = static_cast<std::size_t>(values.cols());
    return PathView{std::span<const double>(times), std::span<const double>(values.row(p).data(), n)};
}

FbmEnsemble FbmEnsemble::subsample(int step) const {
    if (step < 1) throw DomainError("subsample step must be positive");
    const long n = static_cast<long>(times.size());
    if ((n - 1) % step != 0) throw DomainError("subsample step must divide the number of intervals");
    FbmEnsemble out;
    out.seed = seed;
    out.H = H;
    std::vector<long> keep;
    for (long k = 0; k < n; k += step) keep.push_back(k);
    out.times.reserve(keep.size());
    for (long k : keep) out.times.push_back(times[static_cast<std::size_t>(k)]);
    out.values.resize(values.rows(), static_cast<long>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) out.values.col(static_cast<long>(j)) = values.col(keep[j]);
    return out;
}

double covariance(double s, double t, HurstParam H) {
    if (s < 0.0 || t < 0.0) throw DomainError("covariance needs nonnegative times");
    const double p = H.two_h();
    return 0.5 * (abs_pow(s, p) + abs_pow(t, p) - abs_pow(t - s, p));
}

Eigen::MatrixXd covariance_matrix(const std::vector<double>& times, HurstParam H) {
    const auto n = static_cast<long>(times.size());
    Eigen::MatrixXd C(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j <= i; ++j)
            C(i, j) = C(j, i) = covariance(times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)], H);
    return C;
}

std::vector<double> refine(const std::vector<double>& times, int refinement) {
    if (refinement < 1) throw DomainError("grid refinement must be at least 1");
    std::vector<double> out{times.front()};
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double a = times[i - 1], b = times[i];
        for (int k = 1; k < refinement; ++k) out.push_back(a + (b - a) * k / refinement);
        out.push_back(b);
    }
    return out;
}

FbmEnsemble simulate(const TimeGrid& grid, const McConfig& cfg, HurstParam H) {
    cfg.validate();
    const std::vector<double> all = refine({grid.times().begin(), grid.times().end()}, cfg.grid_refinement);
    const std::vector<double> pos(all.begin() + 1, all.end());
    const Eigen::LLT<Eigen::MatrixXd> llt(covariance_matrix(pos, H));
    if (llt.info() != Eigen::Success)
        throw NumericalError("covariance factorization failed (duplicated or degenerate times?)");
    const Eigen::MatrixXd L = llt.matrixL();
    const long n = static_cast<long>(pos.size());

    FbmEnsemble ens;
    ens.times = all;
    ens.seed = cfg.seed;
    ens.H = H;
    ens.values = RowMatrix::Zero(cfg.n_paths, n + 1);

    const long block = 4096;
    Eigen::MatrixXd Z(n, block);
    for (long start = 0; start < cfg.n_paths; start += block) {
        const long m = std::min(block, cfg.n_paths - start);
        for (long p = 0; p < m; ++p) {
            std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(start + p))));
            std::normal_distribution<double> N(0.0, 1.0);
            for (long k = 0; k < n; ++k) Z(k, p) = N(rng);
        }
        const Eigen::MatrixXd X = L.triangularView<Eigen::Lower>() * Z.leftCols(m);
        ens.values.block(start, 1, m, n) = X.transpose();
    }
    return ens;
}

McEstimate mean_and_error(const std::vector<double>& xs) {
    McEstimate out;
    out.n_paths = static_cast<long>(xs.size());
    if (xs.empty()) return out;
    KahanSum s;
    for (double x : xs) s.add(x);
    const double mean = s.value() / static_cast<double>(xs.size());
    KahanSum q;
    for (double x : xs) q.add((x - mean) * (x - mean));
    out.estimate = mean;
    if (xs.size() > 1) {
        const double var = q.value() / static_cast<double>(xs.size() - 1);
        out.std_error = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return out;
}

McEstimate mc_expect(const Expr& e, const FbmEnsemble& ens, const Bindings& b) {
    std::vector<double> vals(static_cast<std::size_t>(ens.n_paths()));
    for (long p = 0; p < ens.n_paths(); ++p) {
        const PathView pv = ens.path(p);
        vals[static_cast<std::size_t>(p)] = eval(e, b, pv);
    }
    return mean_and_error(vals);
}

McEstimate mc_expect(const Expr& e, const McConfig& cfg, HurstParam H, const std::vector<double>& extra_times) {
    std::vector<double> ts = time_labels(e);
    ts.insert(ts.end(), extra_times.begin(), extra_times.end());
    std::sort(ts.begin(), ts.end());
    std::vector<double> grid;
    for (double t : ts)
        if (t > 0.0 && std::isfinite(t) && (grid.empty() || t > grid.back() * (1.0 + 1e-12))) grid.push_back(t);
    if (grid.empty()) {
        McEstimate out;
        out.estimate = eval(e);
        out.n_paths = cfg.n_paths;
        return out;
    }
    const FbmEnsemble ens = simulate(TimeGrid(grid), cfg, H);
    return mc_expect(e, ens);
}

void write_csv(std::ostream& os, const FbmEnsemble& ens) {
    for (std::size_t k = 0; k < ens.times.size(); ++k) os << (k ? "," : "") << format_double(ens.times[k]);
    os << "\n";
    for (long p = 0; p < ens.n_paths(); ++p) {
        for (long k = 0; k < ens.values.cols(); ++k) os << (k ? "," : "") << format_double(ens.values(p, k));
        os << "\n";
    }
}

}  // namespace fracexp
