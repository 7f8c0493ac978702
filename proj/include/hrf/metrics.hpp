#pragma once

#include <string>

#include "hrf/common.hpp"
#include "hrf/rng.hpp"

namespace hrf {

struct MetricReport {
  std::string metric;
  double value = 0.0;
  Eigen::Index n_samples = 0;
  int n_projections = 0;
  std::uint64_t seed = 0;
};

/// Exact 1D 1-Wasserstein distance via order statistics. Unequal sample
/// counts are handled by inverse-CDF interpolation onto a common quantile
/// grid.
double wasserstein1_1d(const VectorXd& a, const VectorXd& b);

/// Sliced 2-Wasserstein: sqrt of the mean over random unit directions of the
/// squared 1D W2 between the projected clouds.
double sliced_w2(const MatrixXd& a, const MatrixXd& b, int n_proj, Rng& rng);

/// Density-normalized histogram over [lo, hi); integrates to at most one
/// (mass outside the range is dropped).
VectorXd histogram(const VectorXd& samples, int bins, double lo, double hi);

}  // namespace hrf
