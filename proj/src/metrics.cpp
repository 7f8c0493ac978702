#include "hrf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hrf {

namespace {

std::vector<double> sorted(const VectorXd& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  return s;
}

// Inverse empirical CDF at quantile q (midpoint convention).
double quantile(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size()) - 0.5;
  if (pos <= 0.0) return s.front();
  if (pos >= static_cast<double>(s.size() - 1)) return s.back();
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] * (1.0 - frac) + s[lo + 1] * frac;
}

// Mean of |qa - qb|^p over a shared quantile grid.
double transport_1d(const VectorXd& a, const VectorXd& b, double p) {
  if (a.size() == 0 || b.size() == 0)
    throw ConfigError("metric requires nonempty sample sets");
  double acc = 0.0;
  if (a.size() == b.size()) {
    const auto sa = sorted(a);
    const auto sb = sorted(b);
    for (std::size_t i = 0; i < sa.size(); ++i)
      acc += std::pow(std::abs(sa[i] - sb[i]), p);
    return acc / static_cast<double>(sa.size());
  }
  const auto sa = sorted(a);
  const auto sb = sorted(b);
  const auto m = static_cast<std::size_t>(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < m; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    acc += std::pow(std::abs(quantile(sa, q) - quantile(sb, q)), p);
  }
  return acc / static_cast<double>(m);
}

}  // namespace

double wasserstein1_1d(const VectorXd& a, const VectorXd& b) {
  return transport_1d(a, b, 1.0);
}

double sliced_w2(const MatrixXd& a, const MatrixXd& b, int n_proj, Rng& rng) {
  if (a.rows() == 0 || b.rows() == 0)
    throw ConfigError("metric requires nonempty sample sets");
  if (a.cols() != b.cols()) throw ConfigError("sample dim mismatch");
  if (n_proj < 1) throw ConfigError("need at least one projection");
  double acc = 0.0;
  for (int k = 0; k < n_proj; ++k) {
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    VectorXd dir(a.cols());
    if (a.cols() == 2) {
      dir << std::cos(theta), std::sin(theta);
    } else {
      dir = rng.normal_vec(a.cols());
      dir.normalize();
    }
    acc += transport_1d(a * dir, b * dir, 2.0);
  }
  return std::sqrt(acc / n_proj);
}

VectorXd histogram(const VectorXd& samples, int bins, double lo, double hi) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  if (!(hi > lo)) throw ConfigError("histogram range must be nonempty");
  VectorXd counts = VectorXd::Zero(bins);
  const double width = (hi - lo) / bins;
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    if (x < lo || x >= hi) continue;
    const auto bin = static_cast<Eigen::Index>((x - lo) / width);
    counts[std::min<Eigen::Index>(bin, bins - 1)] += 1.0;
  }
  if (samples.size() > 0)
    counts /= static_cast<double>(samples.size()) * width;
  return counts;
}

}  // namespace hrf
