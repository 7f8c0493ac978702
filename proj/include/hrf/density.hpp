#pragma once

#include <functional>
#include <string>

#include "hrf/distributions.hpp"
#include "hrf/field.hpp"
#include "hrf/ode.hpp"

namespace hrf {

enum class ProbeLaw { Rademacher, Gaussian };

/// Vector field at a fixed time with an exact vector-Jacobian product.
struct PointField {
  std::function<VectorXd(const VectorXd&)> eval;
  // returns eps^T * Jacobian(eval) at x
  std::function<VectorXd(const VectorXd&, const VectorXd&)> vjp;
};

/// Skilling-Hutchinson trace estimate of the Jacobian divergence at `point`.
double hutchinson_divergence(const PointField& field, const VectorXd& point,
                             int n_probes, Rng& rng,
                             ProbeLaw law = ProbeLaw::Rademacher);

struct LikelihoodOptions {
  SolverConfig solver;
  int n_probes = 1;
  ProbeLaw probe_law = ProbeLaw::Rademacher;
  // Exact scalar derivative instead of stochastic probes when space_dim == 1.
  bool exact_trace_1d = true;
};

/// Log-density of the velocity u at (z_t, t) under a depth-2 model, via the
/// instantaneous change of variables: the inner ODE is solved backward from
/// tau=1 with the divergence accumulated along the path, then the inner
/// source log-density is added. `inner_source` defaults to a standard
/// Gaussian of the field's dimension.
double velocity_log_likelihood(const DirectionField& field, const VectorXd& u,
                               const VectorXd& z_t, double t,
                               const LikelihoodOptions& opts, Rng& rng);

struct LikelihoodReport {
  double log_density = 0.0;  // nats
  double bpd = 0.0;
  std::string estimator;
  int n_outer_samples = 1;
};

double bits_per_dim(double log_density_nats, int dim);

/// Density estimation at t=0: rho_1(z1) averaged over n_avg draws of z0 in
/// the log domain. `pin_z0` evaluates the single point z0 = 0.
LikelihoodReport density_alg3(const DirectionField& field,
                              const DistributionSpec& data_source,
                              const VectorXd& z1, Rng& rng, int n_avg,
                              const LikelihoodOptions& opts,
                              bool pin_z0 = false);

/// Density estimation at an interior time t in (0,1), with rho_t estimated
/// by a Monte Carlo sum of n_rho one-step flows. t may be drawn uniformly by
/// passing a negative value.
LikelihoodReport density_alg4(const DirectionField& field,
                              const DistributionSpec& data_source,
                              const VectorXd& z1, Rng& rng, int n_rho,
                              double t, const LikelihoodOptions& opts);

}  // namespace hrf
