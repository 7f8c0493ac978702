#pragma once

#include "hrf/distributions.hpp"

namespace hrf {
namespace fixtures {

inline StandardGaussian gauss1d() { return StandardGaussian{1}; }

/// Bimodal 1D target: equal weights, means +-1, std 0.145 (well separated,
/// differential entropy 0.261 bits).
inline GaussianMixture two_gauss_1d() {
  GaussianMixture m;
  m.weights = VectorXd::Constant(2, 0.5);
  m.means = MatrixXd(2, 1);
  m.means << -1.0, 1.0;
  m.stds = MatrixXd::Constant(2, 1, 0.145);
  return m;
}

/// Five equally weighted modes spaced evenly on [-4, 4], std 0.2.
inline GaussianMixture five_gauss_1d() {
  GaussianMixture m;
  m.weights = VectorXd::Constant(5, 0.2);
  m.means = MatrixXd(5, 1);
  m.means << -4.0, -2.0, 0.0, 2.0, 4.0;
  m.stds = MatrixXd::Constant(5, 1, 0.2);
  return m;
}

/// Eight isotropic Gaussians on a circle (2D benchmark).
inline GaussianRing ring8() { return GaussianRing{8, 3.0, 0.3}; }

inline Moons moons() { return Moons{0.1}; }

/// Narrow single Gaussian used as a shifted 1D target in oracle tests.
inline GaussianMixture single_gauss_1d(double mean, double std) {
  GaussianMixture m;
  m.weights = VectorXd::Constant(1, 1.0);
  m.means = MatrixXd::Constant(1, 1, mean);
  m.stds = MatrixXd::Constant(1, 1, std);
  return m;
}

inline DistributionSpec by_name(const std::string& name) {
  if (name == "gauss1d") return gauss1d();
  if (name == "two_gauss_1d") return two_gauss_1d();
  if (name == "five_gauss_1d") return five_gauss_1d();
  if (name == "ring8") return ring8();
  if (name == "moons") return moons();
  throw ConfigError("unknown fixture: " + name);
}

}  // namespace fixtures
}  // namespace hrf
