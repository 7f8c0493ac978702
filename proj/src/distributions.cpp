#include "hrf/distributions.hpp"

#include <cmath>
#include <limits>

namespace hrf {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kDensityFloor = 1e-300;

}  // namespace

void GaussianMixture::validate() const {
  const int k = components();
  if (k < 1) throw ConfigError("mixture needs at least one component");
  if (stds.rows() != k || stds.cols() != means.cols() || weights.size() != k)
    throw ConfigError("mixture weight/mean/std shapes disagree");
  if ((stds.array() <= 0.0).any())
    throw ConfigError("mixture stds must be positive");
  if ((weights.array() < 0.0).any() ||
      std::abs(weights.sum() - 1.0) > 1e-12)
    throw ConfigError("mixture weights must be nonnegative and sum to one");
  if (means.cols() < 1 || means.cols() > 2)
    throw ConfigError("mixture dim must be 1 or 2");
}

GaussianMixture GaussianRing::to_mixture() const {
  if (count < 1) throw ConfigError("ring needs at least one component");
  GaussianMixture m;
  m.weights = VectorXd::Constant(count, 1.0 / count);
  m.means.resize(count, 2);
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * M_PI * k / count;
    m.means(k, 0) = radius * std::cos(a);
    m.means(k, 1) = radius * std::sin(a);
  }
  m.stds = MatrixXd::Constant(count, 2, component_std);
  m.validate();
  return m;
}

int spec_dim(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StandardGaussian>) return s.dim;
        if constexpr (std::is_same_v<T, GaussianMixture>) return s.dim();
        if constexpr (std::is_same_v<T, Moons>) return 2;
        if constexpr (std::is_same_v<T, GaussianRing>) return 2;
      },
      spec);
}

namespace {

MatrixXd sample_mixture(const GaussianMixture& m, Eigen::Index n, Rng& rng) {
  m.validate();
  const int k = m.components();
  VectorXd cdf(k);
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += m.weights[i];
    cdf[i] = acc;
  }
  MatrixXd out(n, m.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.uniform();
    int c = 0;
    while (c < k - 1 && u > cdf[c]) ++c;
    for (int d = 0; d < m.dim(); ++d)
      out(i, d) = m.means(c, d) + m.stds(c, d) * rng.normal();
  }
  return out;
}

MatrixXd sample_moons(const Moons& m, Eigen::Index n, Rng& rng) {
  MatrixXd out(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double theta = rng.uniform(0.0, M_PI);
    if (rng.uniform() < 0.5) {
      out(i, 0) = std::cos(theta);
      out(i, 1) = std::sin(theta);
    } else {
      out(i, 0) = 1.0 - std::cos(theta);
      out(i, 1) = 0.5 - std::sin(theta);
    }
    out(i, 0) += m.noise_std * rng.normal();
    out(i, 1) += m.noise_std * rng.normal();
  }
  return out;
}

double mixture_log_density(const GaussianMixture& m, const VectorXd& x) {
  if (x.size() != m.dim()) throw ShapeError("point dim mismatch");
  double best = -std::numeric_limits<double>::infinity();
  VectorXd lp(m.components());
  for (int k = 0; k < m.components(); ++k) {
    double l = std::log(std::max(m.weights[k], kDensityFloor));
    for (int d = 0; d < m.dim(); ++d) {
      const double s2 = m.stds(k, d) * m.stds(k, d);
      const double r = x[d] - m.means(k, d);
      l += -0.5 * (kLog2Pi + std::log(s2) + r * r / s2);
    }
    lp[k] = l;
    best = std::max(best, l);
  }
  double sum = 0.0;
  for (int k = 0; k < m.components(); ++k) sum += std::exp(lp[k] - best);
  return best + std::log(sum);
}

}  // namespace

MatrixXd sample(const DistributionSpec& spec, Eigen::Index n, Rng& rng) {
  if (n < 1) throw ConfigError("sample count must be >= 1");
  return std::visit(
      [&](const auto& s) -> MatrixXd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StandardGaussian>)
          return rng.normal_mat(n, s.dim);
        else if constexpr (std::is_same_v<T, GaussianMixture>)
          return sample_mixture(s, n, rng);
        else if constexpr (std::is_same_v<T, Moons>)
          return sample_moons(s, n, rng);
        else
          return sample_mixture(s.to_mixture(), n, rng);
      },
      spec);
}

double log_density(const DistributionSpec& spec, const VectorXd& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StandardGaussian>) {
          if (x.size() != s.dim) throw ShapeError("point dim mismatch");
          return -0.5 * (s.dim * kLog2Pi + x.squaredNorm());
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          return mixture_log_density(s, x);
        } else if constexpr (std::is_same_v<T, Moons>) {
          throw UnsupportedDensityError(
              "moons distribution has no closed-form density");
        } else {
          return mixture_log_density(s.to_mixture(), x);
        }
      },
      spec);
}

double gaussian_log_pdf(double x, double mean, double var) {
  const double r = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + r * r / var);
}

double gaussian_pdf(double x, double mean, double var) {
  return std::exp(gaussian_log_pdf(x, mean, var));
}

VelocityLaw::VelocityLaw(GaussianMixture t) : target(std::move(t)) {
  target.validate();
  if (target.dim() != 1)
    throw ConfigError("velocity law closed forms require a 1D target");
}

VelocityMixture velocity_mixture(const VelocityLaw& law, double x_t,
                                 double t) {
  if (t < 0.0 || t > 1.0) throw ConfigError("t must lie in [0, 1]");
  const auto& m = law.target;
  const int k = m.components();
  VelocityMixture out;
  out.weights.resize(k);
  out.means.resize(k);
  out.vars.resize(k);
  double rho_t = 0.0;
  for (int i = 0; i < k; ++i) {
    const double s2 = m.stds(i, 0) * m.stds(i, 0);
    const double sig2 = (1.0 - t) * (1.0 - t) + t * t * s2;
    const double num = m.weights[i] * gaussian_pdf(x_t, t * m.means(i, 0), sig2);
    out.weights[i] = num;
    out.means[i] = ((1.0 - t) * (m.means(i, 0) - x_t) + t * s2 * x_t) / sig2;
    out.vars[i] = s2 / sig2;
    rho_t += num;
  }
  if (!(rho_t > kDensityFloor))
    throw UndefinedRegionError(
        "velocity distribution undefined: interpolant marginal vanishes");
  out.weights /= rho_t;
  return out;
}

double marginal_rho_t(const VelocityLaw& law, double x_t, double t) {
  if (t < 0.0 || t > 1.0) throw ConfigError("t must lie in [0, 1]");
  const auto& m = law.target;
  double rho = 0.0;
  for (int i = 0; i < m.components(); ++i) {
    const double s2 = m.stds(i, 0) * m.stds(i, 0);
    const double sig2 = (1.0 - t) * (1.0 - t) + t * t * s2;
    rho += m.weights[i] * gaussian_pdf(x_t, t * m.means(i, 0), sig2);
  }
  return rho;
}

double velocity_pdf(const VelocityLaw& law, double v, double x_t, double t) {
  const VelocityMixture vm = velocity_mixture(law, x_t, t);
  double p = 0.0;
  for (Eigen::Index i = 0; i < vm.weights.size(); ++i)
    p += vm.weights[i] * gaussian_pdf(v, vm.means[i], vm.vars[i]);
  return p;
}

double velocity_pdf_general(const std::function<double(double)>& rho0,
                            const std::function<double(double)>& rho1,
                            const std::function<double(double)>& rho_t,
                            double v, double x_t, double t) {
  const double denom = rho_t(x_t);
  if (!(denom > kDensityFloor))
    throw UndefinedRegionError(
        "velocity distribution undefined: interpolant marginal vanishes");
  return rho0(x_t - t * v) * rho1(x_t + (1.0 - t) * v) / denom;
}

double analytic_gaussian_acceleration(double mean, double var, double u,
                                      double tau) {
  // V0 ~ N(0,1), V1 ~ N(mean, var), V_tau = (1-tau) V0 + tau V1 jointly
  // Gaussian, so the conditional mean of V1 - V0 given V_tau is linear in u.
  const double v_tau_var = (1.0 - tau) * (1.0 - tau) + tau * tau * var;
  const double cov = tau * var - (1.0 - tau);
  return mean + cov * (u - tau * mean) / v_tau_var;
}

double analytic_gaussian_acceleration_slope(double var, double tau) {
  const double v_tau_var = (1.0 - tau) * (1.0 - tau) + tau * tau * var;
  return (tau * var - (1.0 - tau)) / v_tau_var;
}

}  // namespace hrf
