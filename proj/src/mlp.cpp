#include "hrf/mlp.hpp"

#include <cmath>

namespace hrf {

namespace {

constexpr double kOmegaMin = 1.0;
constexpr double kOmegaMax = 1000.0;

double frequency(int i, int half) {
  if (half == 1) return kOmegaMin;
  const double frac = static_cast<double>(i) / static_cast<double>(half - 1);
  return kOmegaMin * std::pow(kOmegaMax / kOmegaMin, frac);
}

MatrixXd activate(const MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::SmoothGate:
      return z.array() * (1.0 / (1.0 + (-z.array()).exp()));
    case Activation::Tanh:
      return z.array().tanh();
  }
  return z;
}

// Derivative w.r.t. the pre-activation.
MatrixXd activate_grad(const MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::SmoothGate: {
      const auto s = (1.0 / (1.0 + (-z.array()).exp())).eval();
      return s * (1.0 + z.array() * (1.0 - s));
    }
    case Activation::Tanh: {
      const auto th = z.array().tanh().eval();
      return 1.0 - th.square();
    }
  }
  return MatrixXd::Ones(z.rows(), z.cols());
}

using WMap = Eigen::Map<const MatrixXd>;
using BMap = Eigen::Map<const VectorXd>;

WMap weight(const VectorXd& th, const LinSpec& l) {
  return WMap(th.data() + l.w_off, l.rows, l.cols);
}
BMap bias(const VectorXd& th, const LinSpec& l) {
  return BMap(th.data() + l.b_off, l.rows);
}

// Affine layer on a batch: rows are examples.
MatrixXd affine(const MatrixXd& x, const VectorXd& th, const LinSpec& l) {
  return (x * weight(th, l).transpose()).rowwise() +
         bias(th, l).transpose();
}

void accumulate_affine_grads(const MatrixXd& x, const MatrixXd& dz,
                             const LinSpec& l, VectorXd& grad) {
  Eigen::Map<MatrixXd>(grad.data() + l.w_off, l.rows, l.cols).noalias() +=
      dz.transpose() * x;
  Eigen::Map<VectorXd>(grad.data() + l.b_off, l.rows) +=
      dz.colwise().sum().transpose();
}

}  // namespace

void MlpConfig::validate() const {
  if (depth < 1) throw ConfigError("depth must be >= 1");
  if (space_dim < 1) throw ConfigError("space_dim must be >= 1");
  if (embed_dim < 2 || embed_dim % 2 != 0)
    throw ConfigError("embed_dim must be even and >= 2");
  if (slot_width < 1) throw ConfigError("slot_width must be >= 1");
  for (int h : trunk_hidden)
    if (h < 1) throw ConfigError("trunk hidden dims must be >= 1");
}

VectorXd sinusoidal_embed(double t, int dim) {
  if (dim < 2 || dim % 2 != 0)
    throw ConfigError("sinusoidal embedding dim must be even and >= 2");
  const int half = dim / 2;
  VectorXd e(dim);
  for (int i = 0; i < half; ++i) {
    const double w = frequency(i, half);
    e[i] = std::sin(w * t);
    e[half + i] = std::cos(w * t);
  }
  return e;
}

MatrixXd sinusoidal_embed(const VectorXd& t, int dim) {
  if (dim < 2 || dim % 2 != 0)
    throw ConfigError("sinusoidal embedding dim must be even and >= 2");
  const int half = dim / 2;
  MatrixXd e(t.size(), dim);
  for (int i = 0; i < half; ++i) {
    const double w = frequency(i, half);
    e.col(i) = (w * t.array()).sin();
    e.col(half + i) = (w * t.array()).cos();
  }
  return e;
}

void Mlp::build_layout() {
  Eigen::Index off = 0;
  auto add = [&off](std::vector<LinSpec>& out, Eigen::Index rows,
                    Eigen::Index cols) {
    LinSpec l;
    l.rows = rows;
    l.cols = cols;
    l.w_off = off;
    l.b_off = off + rows * cols;
    off += l.size();
    out.push_back(l);
  };
  space_lin_.clear();
  time_lin_.clear();
  trunk_.clear();
  for (int d = 0; d < cfg_.depth; ++d) {
    add(space_lin_, cfg_.slot_width, cfg_.space_dim);
    add(time_lin_, cfg_.slot_width, cfg_.embed_dim);
  }
  Eigen::Index in = 2LL * cfg_.depth * cfg_.slot_width;
  for (int h : cfg_.trunk_hidden) {
    add(trunk_, h, in);
    in = h;
  }
  add(trunk_, cfg_.space_dim, in);
  theta_.resize(off);
}

Mlp::Mlp(const MlpConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  build_layout();
  auto init_layer = [this, &rng](const LinSpec& l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.cols));
    for (Eigen::Index i = 0; i < l.size(); ++i)
      theta_[l.w_off + i] = rng.uniform(-bound, bound);
  };
  for (const auto& l : space_lin_) init_layer(l);
  for (const auto& l : time_lin_) init_layer(l);
  for (const auto& l : trunk_) init_layer(l);
  if (cfg_.zero_init_last) {
    const LinSpec& last = trunk_.back();
    theta_.segment(last.w_off, last.size()).setZero();
  }
}

void Mlp::check_inputs(const std::vector<MatrixXd>& spaces,
                       const std::vector<VectorXd>& times) const {
  if (static_cast<int>(spaces.size()) != cfg_.depth ||
      static_cast<int>(times.size()) != cfg_.depth)
    throw ShapeError("number of input slots does not match network depth");
  const Eigen::Index n = spaces[0].rows();
  for (int d = 0; d < cfg_.depth; ++d) {
    if (spaces[d].rows() != n || spaces[d].cols() != cfg_.space_dim)
      throw ShapeError("space input has wrong shape");
    if (times[d].size() != n) throw ShapeError("time input has wrong length");
  }
}

MatrixXd Mlp::forward(const std::vector<MatrixXd>& spaces,
                      const std::vector<VectorXd>& times,
                      MlpCache* cache) const {
  check_inputs(spaces, times);
  const Eigen::Index n = spaces[0].rows();
  const int w = cfg_.slot_width;

  MatrixXd concat(n, 2LL * cfg_.depth * w);
  MlpCache local;
  MlpCache& c = cache ? *cache : local;
  if (cache) {
    c.spaces = spaces;
    c.embeds.resize(cfg_.depth);
    c.space_pre.resize(cfg_.depth);
    c.time_pre.resize(cfg_.depth);
  }
  for (int d = 0; d < cfg_.depth; ++d) {
    MatrixXd e = sinusoidal_embed(times[d], cfg_.embed_dim);
    MatrixXd sp = affine(spaces[d], theta_, space_lin_[d]);
    MatrixXd tp = affine(e, theta_, time_lin_[d]);
    concat.middleCols(2LL * d * w, w) = activate(sp, cfg_.activation);
    concat.middleCols((2LL * d + 1) * w, w) = activate(tp, cfg_.activation);
    if (cache) {
      c.embeds[d] = std::move(e);
      c.space_pre[d] = std::move(sp);
      c.time_pre[d] = std::move(tp);
    }
  }
  if (cache) c.concat = concat;

  MatrixXd h = std::move(concat);
  const std::size_t n_hidden = trunk_.size() - 1;
  if (cache) {
    c.trunk_pre.resize(n_hidden);
    c.trunk_act.resize(n_hidden);
  }
  for (std::size_t i = 0; i < n_hidden; ++i) {
    MatrixXd z = affine(h, theta_, trunk_[i]);
    h = activate(z, cfg_.activation);
    if (cache) {
      c.trunk_pre[i] = std::move(z);
      c.trunk_act[i] = h;
    }
  }
  return affine(h, theta_, trunk_.back());
}

void Mlp::backward(const MlpCache& cache, const MatrixXd& grad_out,
                   VectorXd& grad_theta,
                   std::vector<MatrixXd>* grad_spaces) const {
  const int w = cfg_.slot_width;
  const std::size_t n_hidden = trunk_.size() - 1;
  if (grad_out.rows() != cache.concat.rows() ||
      grad_out.cols() != cfg_.space_dim)
    throw ShapeError("grad_out has wrong shape");

  grad_theta.setZero(theta_.size());

  const MatrixXd& last_in =
      n_hidden > 0 ? cache.trunk_act.back() : cache.concat;
  accumulate_affine_grads(last_in, grad_out, trunk_.back(), grad_theta);
  MatrixXd dh = grad_out * weight(theta_, trunk_.back());

  for (std::size_t i = n_hidden; i-- > 0;) {
    MatrixXd dz =
        dh.array() * activate_grad(cache.trunk_pre[i], cfg_.activation).array();
    const MatrixXd& in = i > 0 ? cache.trunk_act[i - 1] : cache.concat;
    accumulate_affine_grads(in, dz, trunk_[i], grad_theta);
    dh = dz * weight(theta_, trunk_[i]);
  }

  if (grad_spaces) grad_spaces->resize(cfg_.depth);
  for (int d = 0; d < cfg_.depth; ++d) {
    MatrixXd ds = dh.middleCols(2LL * d * w, w).array() *
                  activate_grad(cache.space_pre[d], cfg_.activation).array();
    MatrixXd dt = dh.middleCols((2LL * d + 1) * w, w).array() *
                  activate_grad(cache.time_pre[d], cfg_.activation).array();
    accumulate_affine_grads(cache.spaces[d], ds, space_lin_[d], grad_theta);
    accumulate_affine_grads(cache.embeds[d], dt, time_lin_[d], grad_theta);
    if (grad_spaces) (*grad_spaces)[d] = ds * weight(theta_, space_lin_[d]);
  }
}

VectorXd Mlp::finite_diff_grad(const std::vector<MatrixXd>& spaces,
                               const std::vector<VectorXd>& times,
                               const MatrixXd& grad_out, double eps) const {
  if (eps <= 0.0) throw ConfigError("finite difference eps must be > 0");
  Mlp probe = *this;
  VectorXd grad(theta_.size());
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    const double orig = probe.theta_[i];
    probe.theta_[i] = orig + eps;
    const double hi = (probe.forward(spaces, times).array() *
                       grad_out.array()).sum();
    probe.theta_[i] = orig - eps;
    const double lo = (probe.forward(spaces, times).array() *
                       grad_out.array()).sum();
    probe.theta_[i] = orig;
    grad[i] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

AdamState AdamState::init(Eigen::Index n, double lr) {
  AdamState s;
  s.m = VectorXd::Zero(n);
  s.v = VectorXd::Zero(n);
  s.lr = lr;
  return s;
}

void adam_step(AdamState& state, VectorXd& theta, const VectorXd& grad,
               int iteration) {
  if (theta.size() != state.m.size() || grad.size() != theta.size())
    throw ShapeError("adam_step: parameter/gradient shape mismatch");
  if (!grad.allFinite())
    throw TrainingError("non-finite gradient", iteration);
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v.array() = state.beta2 * state.v.array() +
                    (1.0 - state.beta2) * grad.array().square();
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  theta.array() -= state.lr * (state.m.array() / bc1) /
                   ((state.v.array() / bc2).sqrt() + state.eps);
}

}  // namespace hrf
