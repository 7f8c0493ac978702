#pragma once

#include <vector>

#include "hrf/common.hpp"
#include "hrf/rng.hpp"

namespace hrf {

enum class Activation { SmoothGate, Tanh };

/// Architecture of the direction-field network. The network owns one
/// (space, time) input slot per hierarchy level; each slot is processed by
/// its own linear layer (space) and sinusoidal embedding + linear layer
/// (time). The activations are concatenated and fed through a shared
/// fully-connected trunk that outputs a direction of dimension `space_dim`.
struct MlpConfig {
  int depth = 2;       // number of (space, time) input slots
  int space_dim = 1;   // 1 or 2
  int embed_dim = 64;  // sinusoidal time embedding width, must be even
  int slot_width = 64; // per-slot linear width for both paths
  std::vector<int> trunk_hidden = {128, 128, 128};
  Activation activation = Activation::SmoothGate;
  bool zero_init_last = false;

  void validate() const;
};

/// Sinusoidal time embedding: first half sin, second half cos, geometric
/// frequencies from 1 to 1000. Throws ConfigError for odd or tiny dims.
VectorXd sinusoidal_embed(double t, int dim);
MatrixXd sinusoidal_embed(const VectorXd& t, int dim);

/// Offsets of one affine layer inside the flat parameter vector.
struct LinSpec {
  Eigen::Index w_off = 0, rows = 0, cols = 0, b_off = 0;
  Eigen::Index size() const { return rows * cols + rows; }
};

/// Intermediate activations kept by forward() for the exact reverse pass.
struct MlpCache {
  std::vector<MatrixXd> spaces;             // copies of the slot inputs
  std::vector<MatrixXd> embeds;             // sinusoidal embeddings per slot
  std::vector<MatrixXd> space_pre, time_pre;
  MatrixXd concat;                          // trunk input
  std::vector<MatrixXd> trunk_pre;          // hidden pre-activations
  std::vector<MatrixXd> trunk_act;          // hidden activations
};

/// Fully-connected network with manually derived reverse-mode gradients.
/// Parameters live in one flat 64-bit vector; layers are Eigen maps into it.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const MlpConfig& cfg, Rng& rng);

  const MlpConfig& config() const { return cfg_; }
  Eigen::Index param_count() const { return theta_.size(); }
  VectorXd& params() { return theta_; }
  const VectorXd& params() const { return theta_; }

  /// Batched forward pass. spaces[d] is (n x space_dim), times[d] is length n.
  MatrixXd forward(const std::vector<MatrixXd>& spaces,
                   const std::vector<VectorXd>& times,
                   MlpCache* cache = nullptr) const;

  /// Exact gradients of sum(output .* grad_out) w.r.t. all parameters and,
  /// optionally, the slot space inputs. Requires the cache from forward().
  void backward(const MlpCache& cache, const MatrixXd& grad_out,
                VectorXd& grad_theta,
                std::vector<MatrixXd>* grad_spaces = nullptr) const;

  /// Central finite differences of sum(output .* grad_out); test oracle.
  VectorXd finite_diff_grad(const std::vector<MatrixXd>& spaces,
                            const std::vector<VectorXd>& times,
                            const MatrixXd& grad_out, double eps) const;

 private:
  friend struct MlpLayers;
  MlpConfig cfg_;
  VectorXd theta_;
  std::vector<LinSpec> space_lin_, time_lin_, trunk_;

  void build_layout();
  void check_inputs(const std::vector<MatrixXd>& spaces,
                    const std::vector<VectorXd>& times) const;
};

struct AdamState {
  VectorXd m, v;
  long step = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8, lr = 1e-3;

  static AdamState init(Eigen::Index n, double lr);
};

/// One Adam update with bias correction. Throws TrainingError (tagged with
/// `iteration`) on non-finite gradients.
void adam_step(AdamState& state, VectorXd& theta, const VectorXd& grad,
               int iteration = -1);

}  // namespace hrf
