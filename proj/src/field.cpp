#include "hrf/field.hpp"

#include <cmath>

namespace hrf {

VectorXd DirectionField::eval_one(const std::vector<VectorXd>& spaces,
                                  const VectorXd& times) const {
  std::vector<MatrixXd> s(spaces.size());
  std::vector<VectorXd> t(times.size());
  for (std::size_t d = 0; d < spaces.size(); ++d) {
    s[d] = spaces[d].transpose();
    t[d] = VectorXd::Constant(1, times[static_cast<Eigen::Index>(d)]);
  }
  return eval(s, t).row(0).transpose();
}

MatrixXd MlpField::eval(const std::vector<MatrixXd>& spaces,
                        const std::vector<VectorXd>& times) const {
  return net_->forward(spaces, times);
}

VectorXd MlpField::vjp_space(const std::vector<VectorXd>& spaces,
                             const VectorXd& times, int slot,
                             const VectorXd& eps) const {
  std::vector<MatrixXd> s(spaces.size());
  std::vector<VectorXd> t(spaces.size());
  for (std::size_t d = 0; d < spaces.size(); ++d) {
    s[d] = spaces[d].transpose();
    t[d] = VectorXd::Constant(1, times[static_cast<Eigen::Index>(d)]);
  }
  MlpCache cache;
  net_->forward(s, t, &cache);
  VectorXd grad_theta;
  std::vector<MatrixXd> grad_spaces;
  net_->backward(cache, eps.transpose(), grad_theta, &grad_spaces);
  return grad_spaces[slot].row(0).transpose();
}

namespace {

// Posterior over mixture components given V_tau = u, in the log domain so
// that tail velocities never underflow (every component has full support).
VectorXd component_posterior(const VelocityMixture& vm, double u, double tau) {
  const int k = static_cast<int>(vm.weights.size());
  VectorXd lw(k);
  for (int i = 0; i < k; ++i) {
    const double vt_var = (1.0 - tau) * (1.0 - tau) + tau * tau * vm.vars[i];
    lw[i] = std::log(vm.weights[i]) +
            gaussian_log_pdf(u, tau * vm.means[i], vt_var);
  }
  const double best = lw.maxCoeff();
  VectorXd r = (lw.array() - best).exp();
  return r / r.sum();
}

}  // namespace

double GaussianOracleField::accel(double x_t, double t, double u,
                                  double tau) const {
  const VelocityMixture vm = velocity_mixture(law_, x_t, t);
  const VectorXd r = component_posterior(vm, u, tau);
  double out = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    out +=
        r[i] * analytic_gaussian_acceleration(vm.means[i], vm.vars[i], u, tau);
  return out;
}

double GaussianOracleField::accel_du(double x_t, double t, double u,
                                     double tau) const {
  const VelocityMixture vm = velocity_mixture(law_, x_t, t);
  const int k = static_cast<int>(vm.weights.size());
  const VectorXd r = component_posterior(vm, u, tau);
  VectorXd a(k), da(k), score(k);
  for (int i = 0; i < k; ++i) {
    const double vt_var =
        (1.0 - tau) * (1.0 - tau) + tau * tau * vm.vars[i];
    a[i] = analytic_gaussian_acceleration(vm.means[i], vm.vars[i], u, tau);
    da[i] = analytic_gaussian_acceleration_slope(vm.vars[i], tau);
    score[i] = -(u - tau * vm.means[i]) / vt_var;
  }
  const double mean_score = r.dot(score);
  double d = 0.0;
  for (int i = 0; i < k; ++i)
    d += r[i] * (da[i] + a[i] * (score[i] - mean_score));
  return d;
}

MatrixXd GaussianOracleField::eval(const std::vector<MatrixXd>& spaces,
                                   const std::vector<VectorXd>& times) const {
  if (spaces.size() != 2 || times.size() != 2)
    throw ShapeError("oracle field expects depth-2 inputs");
  const Eigen::Index n = spaces[0].rows();
  MatrixXd out(n, 1);
  for (Eigen::Index i = 0; i < n; ++i)
    out(i, 0) = accel(spaces[0](i, 0), times[0][i], spaces[1](i, 0),
                      times[1][i]);
  return out;
}

VectorXd GaussianOracleField::vjp_space(const std::vector<VectorXd>& spaces,
                                        const VectorXd& times, int slot,
                                        const VectorXd& eps) const {
  if (slot != 1)
    throw ConfigError("oracle field exposes the inner-slot derivative only");
  VectorXd out(1);
  out[0] = eps[0] * accel_du(spaces[0][0], times[0], spaces[1][0], times[1]);
  return out;
}

}  // namespace hrf
