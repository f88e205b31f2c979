#pragma once

#include "fracexp/expr.hpp"
#include "fracexp/functional.hpp"
#include "fracexp/hurst.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace fracexp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct McConfig {
    long n_paths = 10000;
    std::uint64_t seed = 42;
    int grid_refinement = 1;  // subdivisions per functional interval

    void validate() const;
};

/// Simulated paths: values(p, k) = B at grid time k on path p; column 0 is 0.
struct FbmEnsemble {
    std::vector<double> times;
    RowMatrix values;
    std::uint64_t seed = 0;
    HurstParam H{0.75};

    long n_paths() const noexcept { return static_cast<long>(values.rows()); }
    PathView path(long p) const;
    /// Every `step`-th time (the last time must be kept); used for refinement checks.
    FbmEnsemble subsample(int step) const;
};

double covariance(double s, double t, HurstParam H);

/// Covariance matrix of (B_{t_1}, ..., B_{t_n}).
Eigen::MatrixXd covariance_matrix(const std::vector<double>& times, HurstParam H);

/// Grid `times` with every interval split into `refinement` equal parts.
std::vector<double> refine(const std::vector<double>& times, int refinement);

/// Exact Gaussian draws on the refined grid (Cholesky of the covariance).
/// Path p uses its own generator seeded from (seed, p).
FbmEnsemble simulate(const TimeGrid& grid, const McConfig& cfg, HurstParam H);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
};

/// Mean and standard error of e over the ensemble.
McEstimate mc_expect(const Expr& e, const FbmEnsemble& ens, const Bindings& b = {});

/// Simulate on the expression's own time labels (plus `extra_times`) and average.
McEstimate mc_expect(const Expr& e, const McConfig& cfg, HurstParam H, const std::vector<double>& extra_times = {});

/// Mean and standard error of samples with compensated summation.
McEstimate mean_and_error(const std::vector<double>& xs);

/// Header row of times, then one row per path.
void write_csv(std::ostream& os, const FbmEnsemble& ens);

}  // namespace fracexp
