#include "hrf/density.hpp"

#include <cmath>
#include <vector>

namespace hrf {

namespace {

VectorXd draw_probe(int dim, ProbeLaw law, Rng& rng) {
  VectorXd e(dim);
  if (law == ProbeLaw::Rademacher) {
    for (int i = 0; i < dim; ++i) e[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  } else {
    e = rng.normal_vec(dim);
  }
  return e;
}

double log_mean_exp(const std::vector<double>& xs) {
  double best = xs[0];
  for (double x : xs) best = std::max(best, x);
  if (!std::isfinite(best)) return best;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - best);
  return best + std::log(acc / static_cast<double>(xs.size()));
}

}  // namespace

double hutchinson_divergence(const PointField& field, const VectorXd& point,
                             int n_probes, Rng& rng, ProbeLaw law) {
  if (n_probes < 1) throw ConfigError("need at least one probe");
  double acc = 0.0;
  for (int i = 0; i < n_probes; ++i) {
    const VectorXd eps = draw_probe(static_cast<int>(point.size()), law, rng);
    acc += field.vjp(point, eps).dot(eps);
  }
  return acc / n_probes;
}

double velocity_log_likelihood(const DirectionField& field, const VectorXd& u,
                               const VectorXd& z_t, double t,
                               const LikelihoodOptions& opts, Rng& rng) {
  if (field.depth() != 2)
    throw ConfigError("velocity likelihood is defined for depth-2 models");
  if (t < 0.0 || t > 1.0) throw ConfigError("t must lie in [0, 1]");
  const int dim = field.space_dim();
  if (u.size() != dim || z_t.size() != dim)
    throw ShapeError("velocity likelihood input dim mismatch");

  const bool exact = opts.exact_trace_1d && dim == 1;
  // Probes are fixed for the whole trajectory so the RHS is smooth.
  std::vector<VectorXd> probes;
  if (!exact)
    for (int i = 0; i < opts.n_probes; ++i)
      probes.push_back(draw_probe(dim, opts.probe_law, rng));

  std::vector<VectorXd> spaces = {z_t, VectorXd(dim)};
  VectorXd times(2);
  times[0] = t;

  const OdeRhs rhs = [&](double tau, const VectorXd& y, VectorXd& dy) {
    spaces[1] = y.head(dim);
    times[1] = tau;
    dy.head(dim) = field.eval_one(spaces, times);
    double div;
    if (exact) {
      div = field.vjp_space(spaces, times, 1, VectorXd::Ones(1))[0];
    } else {
      div = 0.0;
      for (const auto& eps : probes)
        div += field.vjp_space(spaces, times, 1, eps).dot(eps);
      div /= static_cast<double>(probes.size());
    }
    dy[dim] = div;
  };

  VectorXd y0(dim + 1);
  y0.head(dim) = u;
  y0[dim] = 0.0;
  const VectorXd yend = rk45_solve(rhs, y0, 1.0, 0.0, opts.solver);

  // d log pi / d tau = -div, so integrating the divergence backward yields
  // the log-density change directly: log pi_1(u) = log pi_0(u_0) + q(0).
  const VectorXd u0 = yend.head(dim);
  const double log_pi0 = -0.5 * (dim * 1.8378770664093453 + u0.squaredNorm());
  return log_pi0 + yend[dim];
}

double bits_per_dim(double log_density_nats, int dim) {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  return -log_density_nats / (dim * std::log(2.0));
}

LikelihoodReport density_alg3(const DirectionField& field,
                              const DistributionSpec& data_source,
                              const VectorXd& z1, Rng& rng, int n_avg,
                              const LikelihoodOptions& opts, bool pin_z0) {
  if (n_avg < 1) throw ConfigError("n_avg must be >= 1");
  const int dim = field.space_dim();
  std::vector<double> lls;
  for (int i = 0; i < (pin_z0 ? 1 : n_avg); ++i) {
    VectorXd z0 = VectorXd::Zero(dim);
    if (!pin_z0) z0 = sample(data_source, 1, rng).row(0).transpose();
    lls.push_back(
        velocity_log_likelihood(field, z1 - z0, z0, 0.0, opts, rng));
  }
  LikelihoodReport r;
  r.log_density = log_mean_exp(lls);
  r.bpd = bits_per_dim(r.log_density, dim);
  r.estimator = "alg3-t0";
  r.n_outer_samples = static_cast<int>(lls.size());
  return r;
}

LikelihoodReport density_alg4(const DirectionField& field,
                              const DistributionSpec& data_source,
                              const VectorXd& z1, Rng& rng, int n_rho,
                              double t, const LikelihoodOptions& opts) {
  if (n_rho < 1) throw ConfigError("n_rho must be >= 1");
  if (t < 0.0) t = rng.uniform(1e-3, 1.0 - 1e-3);
  if (t <= 0.0 || t >= 1.0)
    throw ConfigError("interior-time density estimation requires t in (0,1)");
  const int dim = field.space_dim();

  const VectorXd z0 = sample(data_source, 1, rng).row(0).transpose();
  const VectorXd z_t = t * z1 + (1.0 - t) * z0;
  const VectorXd u = (z1 - z_t) / (1.0 - t);

  const double log_pi1 = velocity_log_likelihood(field, u, z_t, t, opts, rng);

  // rho_t(z_t) via one-step flows from fresh source draws.
  std::vector<double> terms;
  terms.reserve(n_rho);
  const MatrixXd z0s = sample(data_source, n_rho, rng);
  for (int i = 0; i < n_rho; ++i) {
    const VectorXd z0i = z0s.row(i).transpose();
    const VectorXd v = (z_t - z0i) / t;
    terms.push_back(velocity_log_likelihood(field, v, z0i, 0.0, opts, rng) -
                    dim * std::log(t));
  }
  const double log_rho_t = log_mean_exp(terms);
  const double log_rho0 = log_density(data_source, z_t - t * u);

  LikelihoodReport r;
  r.log_density = log_pi1 + log_rho_t - log_rho0;
  r.bpd = bits_per_dim(r.log_density, dim);
  r.estimator = "alg4-t";
  r.n_outer_samples = n_rho;
  return r;
}

}  // namespace hrf
