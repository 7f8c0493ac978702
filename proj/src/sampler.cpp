#include "hrf/sampler.hpp"

#include <functional>

namespace hrf {

void SamplerSchedule::validate() const {
  if (steps.empty()) throw ConfigError("schedule must have at least one level");
  for (int s : steps)
    if (s < 1) throw ConfigError("every schedule level needs >= 1 steps");
}

long long SamplerSchedule::nfe() const {
  validate();
  long long p = 1;
  for (int s : steps) p *= s;
  return p;
}

SampleResult sample_batch(const DirectionField& field,
                          const std::vector<DistributionSpec>& sources,
                          const SamplerSchedule& schedule, Eigen::Index n,
                          Rng& rng, const SampleOptions& opts) {
  schedule.validate();
  const int depth = field.depth();
  if (schedule.depth() != depth)
    throw ConfigError("schedule depth does not match field depth");
  if (static_cast<int>(sources.size()) != depth)
    throw ConfigError("need one source distribution per level");
  if (n < 1) throw ConfigError("sample count must be >= 1");
  for (const auto& s : sources)
    if (spec_dim(s) != field.space_dim())
      throw ConfigError("source dim does not match field space_dim");

  std::vector<MatrixXd> spaces(depth);
  std::vector<VectorXd> times(depth);
  std::vector<MatrixXd> first_draw(depth);  // used when redraw_inner is off

  SampleResult result;
  if (opts.record_trajectories) {
    result.trajectories.assign(n, Trajectory{});
    for (Eigen::Index i = 0; i < n; ++i) {
      result.trajectories[i].times =
          VectorXd::LinSpaced(schedule.steps[0] + 1, 0.0, 1.0);
      result.trajectories[i].positions.resize(schedule.steps[0] + 1,
                                              field.space_dim());
    }
  }

  std::function<MatrixXd(int)> integrate = [&](int d) -> MatrixXd {
    MatrixXd z;
    if (d == 0 || opts.redraw_inner) {
      z = sample(sources[d], n, rng);
    } else {
      if (first_draw[d].size() == 0) first_draw[d] = sample(sources[d], n, rng);
      z = first_draw[d];
    }
    const int steps = schedule.steps[d];
    const double dt = 1.0 / steps;
    if (d == 0 && opts.record_trajectories)
      for (Eigen::Index i = 0; i < n; ++i)
        result.trajectories[i].positions.row(0) = z.row(i);
    for (int j = 0; j < steps; ++j) {
      spaces[d] = z;
      times[d] = VectorXd::Constant(n, j * dt);
      const MatrixXd dir =
          (d == depth - 1) ? field.eval(spaces, times) : integrate(d + 1);
      z += dt * dir;
      if (d == 0 && opts.record_trajectories)
        for (Eigen::Index i = 0; i < n; ++i)
          result.trajectories[i].positions.row(j + 1) = z.row(i);
    }
    return z;
  };

  result.points = integrate(0);
  return result;
}

std::pair<VectorXd, Trajectory> sample_one(
    const DirectionField& field, const std::vector<DistributionSpec>& sources,
    const SamplerSchedule& schedule, Rng& rng) {
  SampleOptions opts;
  opts.record_trajectories = true;
  SampleResult r = sample_batch(field, sources, schedule, 1, rng, opts);
  return {r.points.row(0).transpose(), r.trajectories[0]};
}

}  // namespace hrf
