#pragma once

#include <vector>

#include "hrf/distributions.hpp"
#include "hrf/mlp.hpp"

namespace hrf {

/// Direction field f(x^(1..D), t^(1..D)) evaluated at the deepest hierarchy
/// level. Implementations: the trained network, the closed-form Gaussian
/// oracle, and the instrumented counting wrapper.
class DirectionField {
 public:
  virtual ~DirectionField() = default;
  virtual int depth() const = 0;
  virtual int space_dim() const = 0;

  /// Batched evaluation: spaces[d] is (n x space_dim), times[d] length n.
  virtual MatrixXd eval(const std::vector<MatrixXd>& spaces,
                        const std::vector<VectorXd>& times) const = 0;

  /// eps^T * d f / d spaces[slot] for a single point; used by the
  /// divergence estimator.
  virtual VectorXd vjp_space(const std::vector<VectorXd>& spaces,
                             const VectorXd& times, int slot,
                             const VectorXd& eps) const = 0;

  /// Single-point convenience wrapper around eval().
  VectorXd eval_one(const std::vector<VectorXd>& spaces,
                    const VectorXd& times) const;
};

/// Adapter exposing the trained network as a direction field.
class MlpField : public DirectionField {
 public:
  explicit MlpField(const Mlp* net) : net_(net) {}

  int depth() const override { return net_->config().depth; }
  int space_dim() const override { return net_->config().space_dim; }
  MatrixXd eval(const std::vector<MatrixXd>& spaces,
                const std::vector<VectorXd>& times) const override;
  VectorXd vjp_space(const std::vector<VectorXd>& spaces,
                     const VectorXd& times, int slot,
                     const VectorXd& eps) const override;

 private:
  const Mlp* net_;
};

/// Exact depth-2 acceleration field for a standard Gaussian source and a 1D
/// Gaussian mixture target: the conditional velocity law at (x_t, t) is a
/// Gaussian mixture, and the expected acceleration follows by Gaussian
/// conditioning with a posterior over components.
class GaussianOracleField : public DirectionField {
 public:
  explicit GaussianOracleField(GaussianMixture target)
      : law_(std::move(target)) {}

  int depth() const override { return 2; }
  int space_dim() const override { return 1; }
  MatrixXd eval(const std::vector<MatrixXd>& spaces,
                const std::vector<VectorXd>& times) const override;
  VectorXd vjp_space(const std::vector<VectorXd>& spaces,
                     const VectorXd& times, int slot,
                     const VectorXd& eps) const override;

  /// Scalar field value a(x_t, t, u, tau) and its exact du derivative.
  double accel(double x_t, double t, double u, double tau) const;
  double accel_du(double x_t, double t, double u, double tau) const;

  const VelocityLaw& law() const { return law_; }

 private:
  VelocityLaw law_;
};

/// Counts forward evaluations (one per batch row) for the NFE audit.
class CountingField : public DirectionField {
 public:
  explicit CountingField(const DirectionField* inner) : inner_(inner) {}

  int depth() const override { return inner_->depth(); }
  int space_dim() const override { return inner_->space_dim(); }
  MatrixXd eval(const std::vector<MatrixXd>& spaces,
                const std::vector<VectorXd>& times) const override {
    count_ += spaces[0].rows();
    return inner_->eval(spaces, times);
  }
  VectorXd vjp_space(const std::vector<VectorXd>& spaces,
                     const VectorXd& times, int slot,
                     const VectorXd& eps) const override {
    return inner_->vjp_space(spaces, times, slot, eps);
  }

  long long count() const { return count_; }
  void reset() { count_ = 0; }

 private:
  const DirectionField* inner_;
  mutable long long count_ = 0;
};

}  // namespace hrf
