#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hrf/coupling.hpp"
#include "hrf/distributions.hpp"
#include "hrf/field.hpp"
#include "hrf/mlp.hpp"

namespace hrf {

/// Trained depth-D direction-field model plus its per-level source
/// distributions (sources[0] is the data-space source).
struct HrfModel {
  Mlp net;
  std::vector<DistributionSpec> sources;

  int depth() const { return net.config().depth; }
  int space_dim() const { return net.config().space_dim; }
  MlpField field() const { return MlpField(&net); }
};

/// One flow-matching example: per-level interpolated locations, per-level
/// times, and the direction target x1 - sum_d x0^(d).
struct TrainingExample {
  std::vector<VectorXd> spaces;
  VectorXd times;
  VectorXd target;
};

/// Batched example construction. x0s[d] holds the level-(d+1) source draws.
struct TrainingBatch {
  std::vector<MatrixXd> spaces;
  std::vector<VectorXd> times;
  MatrixXd targets;
};

TrainingBatch build_training_batch(const MatrixXd& x1,
                                   const std::vector<MatrixXd>& x0s,
                                   const MatrixXd& t);

/// Single-example construction; draws all source levels from standard
/// Gaussians and times from the unit cube.
TrainingExample make_training_example(const VectorXd& x1, Rng& rng, int depth);

/// Mean squared direction-matching loss over a batch with exact parameter
/// gradients.
std::pair<double, VectorXd> loss_and_grads(const Mlp& net,
                                           const TrainingBatch& batch);

enum class LrDecay { None, Cosine };

struct TrainConfig {
  int depth = 2;
  int batch = 1024;
  int iterations = 4000;
  double lr = 1e-3;
  LrDecay lr_decay = LrDecay::None;
  std::uint64_t seed = 0;
  int log_every = 50;
  CouplingMode coupling = CouplingMode::Independent;
  int ot_cap = 1024;
  // Fixed-dataset protocol by default; fresh draws from the target spec
  // otherwise.
  int dataset_size = 100000;
  bool fresh_samples = false;
};

struct TrainResult {
  HrfModel model;
  std::vector<std::pair<int, double>> loss_curve;  // (iteration, loss)
};

/// Full training loop: sample minibatch, build examples, loss, Adam step.
/// `target` supplies the data; `source` is the level-1 source distribution;
/// deeper levels default to standard Gaussians unless `inner_sources` is
/// given. Deterministic given the seed.
TrainResult train(const TrainConfig& cfg, const MlpConfig& net_cfg,
                  const DistributionSpec& source,
                  const DistributionSpec& target,
                  const std::optional<std::vector<DistributionSpec>>&
                      inner_sources = std::nullopt,
                  const MatrixXd* dataset = nullptr);

}  // namespace hrf
