#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hrf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad dims, unknown keys, mismatched depth, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Tensor shape mismatch between inputs and a network or operation.
struct ShapeError : Error {
  using Error::Error;
};

/// Non-finite loss or gradients during optimization.
struct TrainingError : Error {
  int iteration = -1;
  TrainingError(const std::string& msg, int iter)
      : Error(msg + " (iteration " + std::to_string(iter) + ")"), iteration(iter) {}
};

/// Adaptive ODE solver ran out of steps.
struct SolverError : Error {
  double error_estimate = 0.0;
  SolverError(const std::string& msg, double err)
      : Error(msg), error_estimate(err) {}
};

/// Evaluation requested where the interpolant marginal vanishes.
struct UndefinedRegionError : Error {
  using Error::Error;
};

/// Density requested for a distribution without a closed-form pdf.
struct UnsupportedDensityError : Error {
  using Error::Error;
};

}  // namespace hrf
