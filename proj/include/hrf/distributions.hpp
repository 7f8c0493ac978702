#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "hrf/common.hpp"
#include "hrf/rng.hpp"

namespace hrf {

struct StandardGaussian {
  int dim = 1;
};

/// Diagonal-covariance Gaussian mixture. means and stds are (K x dim).
struct GaussianMixture {
  VectorXd weights;
  MatrixXd means;
  MatrixXd stds;

  int dim() const { return static_cast<int>(means.cols()); }
  int components() const { return static_cast<int>(means.rows()); }
  void validate() const;
};

/// Two interleaved half circles (2D), unit radius, standard (1, 0.5) offset.
struct Moons {
  double noise_std = 0.1;
};

/// `count` isotropic Gaussians with means equally spaced on a circle (2D).
struct GaussianRing {
  int count = 8;
  double radius = 3.0;
  double component_std = 0.3;

  GaussianMixture to_mixture() const;
};

using DistributionSpec =
    std::variant<StandardGaussian, GaussianMixture, Moons, GaussianRing>;

int spec_dim(const DistributionSpec& spec);

/// n i.i.d. samples, one per row.
MatrixXd sample(const DistributionSpec& spec, Eigen::Index n, Rng& rng);

/// Exact log pdf; throws UnsupportedDensityError for Moons.
double log_density(const DistributionSpec& spec, const VectorXd& x);

double gaussian_log_pdf(double x, double mean, double var);
double gaussian_pdf(double x, double mean, double var);

/// Closed-form machinery for the velocity distribution of the linear
/// interpolation between a standard Gaussian source and a 1D Gaussian
/// mixture target.
struct VelocityLaw {
  GaussianMixture target;  // 1D

  explicit VelocityLaw(GaussianMixture t);
};

/// Velocity mixture at (x_t, t): weights sum to one, per-component mean and
/// variance of the conditional velocity.
struct VelocityMixture {
  VectorXd weights, means, vars;
};

/// Throws UndefinedRegionError when the interpolant marginal at x_t vanishes.
VelocityMixture velocity_mixture(const VelocityLaw& law, double x_t, double t);

/// Marginal density of the interpolant X_t = (1-t) X_0 + t X_1 at x_t.
double marginal_rho_t(const VelocityLaw& law, double x_t, double t);

/// Conditional velocity density pi_1(v; x_t, t) in closed form.
double velocity_pdf(const VelocityLaw& law, double v, double x_t, double t);

/// Generic form rho_0(x_t - t v) rho_1(x_t + (1-t) v) / rho_t(x_t) for
/// arbitrary callable pdfs.
double velocity_pdf_general(const std::function<double(double)>& rho0,
                            const std::function<double(double)>& rho1,
                            const std::function<double(double)>& rho_t,
                            double v, double x_t, double t);

/// Conditional mean E[V1 - V0 | V_tau = u] for independent V0 ~ N(0,1) and
/// V1 ~ N(mean, var) under the linear interpolation V_tau.
double analytic_gaussian_acceleration(double mean, double var, double u,
                                      double tau);

/// d/du of analytic_gaussian_acceleration (the field is linear in u).
double analytic_gaussian_acceleration_slope(double var, double tau);

}  // namespace hrf
