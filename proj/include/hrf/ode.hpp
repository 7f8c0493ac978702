#pragma once

#include <functional>

#include "hrf/common.hpp"

namespace hrf {

struct SolverConfig {
  double atol = 1e-5;
  double rtol = 1e-5;
  int max_steps = 100000;

  void validate() const {
    if (atol <= 0.0 || rtol <= 0.0)
      throw ConfigError("solver tolerances must be positive");
  }
};

struct SolverStats {
  int n_steps = 0;
  int n_accepted = 0;
  int n_rhs = 0;
};

using OdeRhs = std::function<void(double, const VectorXd&, VectorXd&)>;

/// Dormand-Prince 5(4) adaptive integration from t0 to t1 (either
/// direction). Per-component error control at (atol, rtol); throws
/// SolverError with the last error estimate when max_steps is exhausted.
VectorXd rk45_solve(const OdeRhs& rhs, VectorXd y0, double t0, double t1,
                    const SolverConfig& cfg, SolverStats* stats = nullptr);

}  // namespace hrf
