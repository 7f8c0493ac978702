#pragma once

#include <vector>

#include "hrf/distributions.hpp"
#include "hrf/field.hpp"

namespace hrf {

/// Per-level Euler step counts, outermost first. NFE is their product.
struct SamplerSchedule {
  std::vector<int> steps;

  int depth() const { return static_cast<int>(steps.size()); }
  long long nfe() const;
  void validate() const;
};

/// Outer-level path of one generated sample: steps[0]+1 positions on the
/// uniform time grid over [0, 1].
struct Trajectory {
  VectorXd times;
  MatrixXd positions;  // (steps[0]+1) x space_dim
};

struct SampleOptions {
  bool record_trajectories = false;
  // Redraw the inner-level source at every outer step (the default); the
  // alternative draws once per sample, exposed for ablation.
  bool redraw_inner = true;
};

struct SampleResult {
  MatrixXd points;
  std::vector<Trajectory> trajectories;
};

/// Nested Euler integration of the coupled ODEs for a batch of n samples.
/// Each level d advances with steps[d] uniform steps of size 1/steps[d]; the
/// direction at level d is the converged level-(d+1) endpoint, and the field
/// itself at the deepest level. Deterministic given the rng state.
SampleResult sample_batch(const DirectionField& field,
                          const std::vector<DistributionSpec>& sources,
                          const SamplerSchedule& schedule, Eigen::Index n,
                          Rng& rng, const SampleOptions& opts = {});

/// Single-sample convenience wrapper.
std::pair<VectorXd, Trajectory> sample_one(const DirectionField& field,
                                           const std::vector<DistributionSpec>& sources,
                                           const SamplerSchedule& schedule,
                                           Rng& rng);

}  // namespace hrf
