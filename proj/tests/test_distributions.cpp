#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hrf/distributions.hpp"
#include "hrf/fixtures.hpp"

using namespace hrf;

TEST_CASE("gaussian log densities") {
  VectorXd x(1);
  x << 0.0;
  CHECK(log_density(StandardGaussian{1}, x) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  x << 1.0;
  CHECK(log_density(StandardGaussian{1}, x) ==
        doctest::Approx(-1.4189385332046727).epsilon(1e-14));
  VectorXd x2(2);
  x2 << 0.0, 0.0;
  CHECK(log_density(StandardGaussian{2}, x2) ==
        doctest::Approx(-1.8378770664093453).epsilon(1e-14));

  // single-component mixture agrees with the plain Gaussian pdf
  const GaussianMixture g = fixtures::single_gauss_1d(2.0, 0.5);
  x << 1.3;
  CHECK(log_density(DistributionSpec(g), x) ==
        doctest::Approx(gaussian_log_pdf(1.3, 2.0, 0.25)).epsilon(1e-14));
}

TEST_CASE("mixture density normalizes and matches sampling moments") {
  const GaussianMixture m = fixtures::two_gauss_1d();
  // trapezoid quadrature of the density over a wide range
  const int n = 20000;
  const double lo = -8.0, hi = 8.0, h = (hi - lo) / n;
  double mass = 0.0, mean = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    VectorXd v(1);
    v << x;
    const double p = std::exp(log_density(DistributionSpec(m), v));
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    mass += w * p * h;
    mean += w * x * p * h;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-8));

  Rng rng(5);
  const MatrixXd s = sample(DistributionSpec(m), 200000, rng);
  CHECK(s.col(0).mean() == doctest::Approx(0.0).epsilon(1.0).scale(0.01));
  const double var =
      (s.col(0).array() - s.col(0).mean()).square().mean();
  CHECK(var == doctest::Approx(1.0 + 0.145 * 0.145).epsilon(0.02));
}

TEST_CASE("moons generator produces two offset half circles") {
  Rng rng(11);
  Moons m;
  m.noise_std = 0.0;
  const MatrixXd s = sample(DistributionSpec(m), 5000, rng);
  int upper = 0, lower = 0;
  for (int i = 0; i < s.rows(); ++i) {
    const double x = s(i, 0), y = s(i, 1);
    const double r_up = std::hypot(x, y);
    const double r_lo = std::hypot(x - 1.0, y - 0.5);
    if (std::abs(r_up - 1.0) < 1e-9 && y >= 0.0) {
      upper++;
    } else {
      CHECK(std::abs(r_lo - 1.0) < 1e-9);
      CHECK(y <= 0.5 + 1e-12);
      lower++;
    }
  }
  CHECK(upper + lower == 5000);
  CHECK(upper > 2200);
  CHECK(lower > 2200);
  VectorXd p(2);
  CHECK_THROWS_AS(log_density(DistributionSpec(m), p), UnsupportedDensityError);
}

TEST_CASE("gaussian ring means lie on the circle with uniform occupancy") {
  const GaussianRing ring{8, 8.0, 0.5};
  const GaussianMixture m = ring.to_mixture();
  REQUIRE(m.components() == 8);
  for (int k = 0; k < 8; ++k)
    CHECK(m.means.row(k).norm() == doctest::Approx(8.0).epsilon(1e-12));

  Rng rng(13);
  const MatrixXd s = sample(DistributionSpec(ring), 10000, rng);
  VectorXd counts = VectorXd::Zero(8);
  for (int i = 0; i < s.rows(); ++i) {
    int best = 0;
    double bd = 1e300;
    for (int k = 0; k < 8; ++k) {
      const double d = (s.row(i) - m.means.row(k)).squaredNorm();
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    counts[best] += 1.0;
  }
  // chi-square uniformity at the 1% level (7 dof critical value 18.48)
  const double expected = 10000.0 / 8.0;
  double chi2 = 0.0;
  for (int k = 0; k < 8; ++k)
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
  CHECK(chi2 < 18.48);
}

TEST_CASE("mixture validation rejects malformed parameters") {
  GaussianMixture m = fixtures::two_gauss_1d();
  m.weights[0] = 0.7;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = fixtures::two_gauss_1d();
  m.stds(0, 0) = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("velocity mixture weights sum to one") {
  const VelocityLaw law(fixtures::two_gauss_1d());
  for (double t : {0.0, 0.3, 0.7, 1.0})
    for (double x : {-1.5, 0.0, 0.8}) {
      const VelocityMixture vm = velocity_mixture(law, x, t);
      CHECK(vm.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((vm.vars.array() > 0.0).all());
    }
}

TEST_CASE("closed form matches the generic velocity pdf on a grid") {
  const GaussianMixture target = fixtures::two_gauss_1d();
  const VelocityLaw law(target);
  const auto rho0 = [](double x) { return gaussian_pdf(x, 0.0, 1.0); };
  const auto rho1 = [&target](double x) {
    VectorXd v(1);
    v << x;
    return std::exp(log_density(DistributionSpec(target), v));
  };

  double worst = 0.0;
  for (int iv = 0; iv < 10; ++iv)
    for (int ix = 0; ix < 10; ++ix)
      for (int it = 0; it < 10; ++it) {
        const double v = -4.0 + 8.0 * iv / 9.0;
        const double x_t = -2.0 + 4.0 * ix / 9.0;
        const double t = 0.05 + 0.9 * it / 9.0;
        const auto rho_t = [&law, t](double x) {
          return marginal_rho_t(law, x, t);
        };
        const double a = velocity_pdf(law, v, x_t, t);
        const double b = velocity_pdf_general(rho0, rho1, rho_t, v, x_t, t);
        worst = std::max(worst, std::abs(a - b));
      }
  CHECK(worst <= 1e-9);
}

TEST_CASE("velocity pdf boundary cases") {
  const VelocityLaw law(fixtures::two_gauss_1d());
  // t=1: x1 pinned at x_t, v = x_t - x0, so pi_1(v) = rho_0(x_t - v)
  for (double v : {-1.0, 0.0, 0.5, 2.0})
    CHECK(velocity_pdf(law, v, 1.0, 1.0) ==
          doctest::Approx(gaussian_pdf(1.0 - v, 0.0, 1.0)).epsilon(1e-9));
  // t=0: x0 pinned, v = x1 - x_t, so pi_1(v) = rho_1(x_t + v)
  VectorXd p(1);
  for (double v : {-1.0, 0.0, 1.3}) {
    p << -1.0 + v;
    CHECK(velocity_pdf(law, v, -1.0, 0.0) ==
          doctest::Approx(std::exp(log_density(
                              DistributionSpec(law.target), p)))
              .epsilon(1e-9));
  }
}

TEST_CASE("velocity pdf integrates to one in v") {
  const VelocityLaw law(fixtures::two_gauss_1d());
  for (auto [x_t, t] : {std::pair{0.0, 0.4}, {0.5, 0.6}, {-1.0, 0.2}}) {
    const int n = 40000;
    const double lo = -12.0, hi = 12.0, h = (hi - lo) / n;
    double mass = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      mass += w * velocity_pdf(law, lo + i * h, x_t, t) * h;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("marginal density matches a Monte Carlo interpolant histogram") {
  const VelocityLaw law(fixtures::two_gauss_1d());
  Rng rng(21);
  const double t = 0.6;
  const int n = 200000;
  VectorXd xt(n);
  const MatrixXd x1 = sample(DistributionSpec(law.target), n, rng);
  for (int i = 0; i < n; ++i)
    xt[i] = (1.0 - t) * rng.normal() + t * x1(i, 0);
  const int bins = 200;
  const double lo = -3.0, hi = 3.0, width = (hi - lo) / bins;
  VectorXd hist = VectorXd::Zero(bins);
  int kept = 0;
  for (int i = 0; i < n; ++i) {
    if (xt[i] < lo || xt[i] >= hi) continue;
    hist[static_cast<int>((xt[i] - lo) / width)] += 1.0;
    kept++;
  }
  hist /= n * width;
  double l1 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double x = lo + (b + 0.5) * width;
    l1 += std::abs(hist[b] - marginal_rho_t(law, x, t)) * width;
  }
  CHECK(l1 < 0.02);
}

TEST_CASE("undefined region raises a typed error") {
  const VelocityLaw law(fixtures::two_gauss_1d());
  CHECK_THROWS_AS(velocity_mixture(law, 60.0, 0.0), UndefinedRegionError);
  CHECK_THROWS_AS(velocity_pdf(law, 0.0, 60.0, 0.0), UndefinedRegionError);
}

TEST_CASE("analytic acceleration matches a Monte Carlo conditional mean") {
  // V0 ~ N(0,1), V1 ~ N(m, s^2); condition V_tau on a narrow window at u.
  const double m = 1.2, s = 0.7, tau = 0.35;
  Rng rng(31);
  const double u = 0.4, half = 0.01;
  double acc = 0.0;
  long long kept = 0;
  while (kept < 200000) {
    const double v0 = rng.normal();
    const double v1 = m + s * rng.normal();
    const double vt = (1.0 - tau) * v0 + tau * v1;
    if (std::abs(vt - u) <= half) {
      acc += v1 - v0;
      kept++;
    }
  }
  CHECK(acc / kept ==
        doctest::Approx(analytic_gaussian_acceleration(m, s * s, u, tau))
            .epsilon(1.0)
            .scale(0.02));
}

TEST_CASE("acceleration slope is the u-derivative") {
  const double m = -0.5, var = 0.3;
  for (double tau : {0.1, 0.5, 0.9}) {
    const double eps = 1e-6;
    const double fd = (analytic_gaussian_acceleration(m, var, 1.0 + eps, tau) -
                       analytic_gaussian_acceleration(m, var, 1.0 - eps, tau)) /
                      (2 * eps);
    CHECK(analytic_gaussian_acceleration_slope(var, tau) ==
          doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("fixture lookup by name") {
  CHECK(spec_dim(fixtures::by_name("two_gauss_1d")) == 1);
  CHECK(spec_dim(fixtures::by_name("ring8")) == 2);
  CHECK(spec_dim(fixtures::by_name("moons")) == 2);
  CHECK_THROWS_AS(fixtures::by_name("nope"), ConfigError);
}
