#include "hrf/hrf.hpp"

#include <cmath>

namespace hrf {

TrainingBatch build_training_batch(const MatrixXd& x1,
                                   const std::vector<MatrixXd>& x0s,
                                   const MatrixXd& t) {
  const auto depth = static_cast<int>(x0s.size());
  const Eigen::Index n = x1.rows();
  if (t.rows() != n || t.cols() != depth)
    throw ShapeError("time matrix shape mismatch");
  TrainingBatch b;
  b.spaces.resize(depth);
  b.times.resize(depth);
  b.targets = x1;
  // remainder(d) = x1 - sum_{k<d} x0^(k); x_t^(d) interpolates x0^(d) with it.
  MatrixXd remainder = x1;
  for (int d = 0; d < depth; ++d) {
    if (x0s[d].rows() != n || x0s[d].cols() != x1.cols())
      throw ShapeError("source batch shape mismatch");
    const auto td = t.col(d).array();
    b.spaces[d] = (x0s[d].array().colwise() * (1.0 - td)).matrix() +
                  (remainder.array().colwise() * td).matrix();
    b.times[d] = t.col(d);
    remainder -= x0s[d];
    b.targets -= x0s[d];
  }
  return b;
}

TrainingExample make_training_example(const VectorXd& x1, Rng& rng,
                                      int depth) {
  if (depth < 1) throw ConfigError("depth must be >= 1");
  const auto dim = x1.size();
  std::vector<MatrixXd> x0s(depth);
  MatrixXd t(1, depth);
  for (int d = 0; d < depth; ++d) {
    x0s[d] = rng.normal_vec(dim).transpose();
    t(0, d) = rng.uniform();
  }
  const TrainingBatch b = build_training_batch(x1.transpose(), x0s, t);
  TrainingExample e;
  e.spaces.resize(depth);
  e.times.resize(depth);
  for (int d = 0; d < depth; ++d) {
    e.spaces[d] = b.spaces[d].row(0).transpose();
    e.times[d] = b.times[d][0];
  }
  e.target = b.targets.row(0).transpose();
  return e;
}

std::pair<double, VectorXd> loss_and_grads(const Mlp& net,
                                           const TrainingBatch& batch) {
  const Eigen::Index n = batch.targets.rows();
  if (n < 1) throw ConfigError("loss requires a nonempty batch");
  MlpCache cache;
  const MatrixXd pred = net.forward(batch.spaces, batch.times, &cache);
  const MatrixXd resid = pred - batch.targets;
  const double denom = static_cast<double>(n * batch.targets.cols());
  const double loss = resid.squaredNorm() / denom;
  VectorXd grad;
  net.backward(cache, (2.0 / denom) * resid, grad);
  return {loss, grad};
}

TrainResult train(const TrainConfig& cfg, const MlpConfig& net_cfg,
                  const DistributionSpec& source,
                  const DistributionSpec& target,
                  const std::optional<std::vector<DistributionSpec>>&
                      inner_sources,
                  const MatrixXd* dataset) {
  if (cfg.batch < 1 || cfg.iterations < 1)
    throw ConfigError("batch and iterations must be >= 1");
  if (cfg.depth != net_cfg.depth)
    throw ConfigError("training depth and network depth disagree");
  if (spec_dim(source) != net_cfg.space_dim ||
      spec_dim(target) != net_cfg.space_dim)
    throw ConfigError("distribution dims and network space_dim disagree");

  std::vector<DistributionSpec> sources;
  sources.push_back(source);
  if (inner_sources) {
    if (static_cast<int>(inner_sources->size()) != cfg.depth - 1)
      throw ConfigError("need one inner source per level below the first");
    for (const auto& s : *inner_sources) sources.push_back(s);
  } else {
    for (int d = 1; d < cfg.depth; ++d)
      sources.emplace_back(StandardGaussian{net_cfg.space_dim});
  }

  Rng init_rng = Rng::child(cfg.seed, 0);
  Rng data_rng = Rng::child(cfg.seed, 1);
  Rng loop_rng = Rng::child(cfg.seed, 2);

  TrainResult result;
  result.model.net = Mlp(net_cfg, init_rng);
  result.model.sources = sources;
  Mlp& net = result.model.net;
  AdamState adam = AdamState::init(net.param_count(), cfg.lr);

  MatrixXd data;
  if (!cfg.fresh_samples) {
    data = dataset ? *dataset : sample(target, cfg.dataset_size, data_rng);
    if (data.cols() != net_cfg.space_dim)
      throw ConfigError("dataset dim and network space_dim disagree");
  }

  std::vector<MatrixXd> x0s(cfg.depth);
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    MatrixXd x1(cfg.batch, net_cfg.space_dim);
    if (cfg.fresh_samples) {
      x1 = sample(target, cfg.batch, loop_rng);
    } else {
      for (int i = 0; i < cfg.batch; ++i)
        x1.row(i) = data.row(static_cast<Eigen::Index>(
            loop_rng.integer(static_cast<std::uint64_t>(data.rows()))));
    }
    for (int d = 0; d < cfg.depth; ++d)
      x0s[d] = sample(sources[d], cfg.batch, loop_rng);
    // Only the outermost pair is OT-coupled; inner sources stay independent.
    x1 = couple_for_training(cfg.coupling, x0s[0], x1, cfg.ot_cap);
    MatrixXd t(cfg.batch, cfg.depth);
    for (int i = 0; i < cfg.batch; ++i)
      for (int d = 0; d < cfg.depth; ++d) t(i, d) = loop_rng.uniform();

    const TrainingBatch batch = build_training_batch(x1, x0s, t);
    const auto [loss, grad] = loss_and_grads(net, batch);
    if (!std::isfinite(loss)) throw TrainingError("non-finite loss", iter);
    if (cfg.lr_decay == LrDecay::Cosine)
      adam.lr = cfg.lr * 0.5 * (1.0 + std::cos(M_PI * iter / cfg.iterations));
    adam_step(adam, net.params(), grad, iter);
    if (iter % cfg.log_every == 0 || iter == cfg.iterations - 1)
      result.loss_curve.emplace_back(iter, loss);
  }
  return result;
}

}  // namespace hrf
