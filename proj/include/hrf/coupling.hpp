#pragma once

#include <vector>

#include "hrf/common.hpp"

namespace hrf {

enum class CouplingMode { Independent, OptimalTransport };

/// Pairing of a source batch with a target batch: perm[i] is the target
/// index assigned to source i; cost is the mean squared distance over pairs.
struct BatchCoupling {
  std::vector<int> perm;
  double transport_cost = 0.0;
};

BatchCoupling independent_coupling(const MatrixXd& x0s, const MatrixXd& x1s);

/// Exact minimum-cost assignment under squared Euclidean ground cost,
/// solved with the Hungarian algorithm. Throws ConfigError beyond `cap`.
BatchCoupling ot_coupling(const MatrixXd& x0s, const MatrixXd& x1s,
                          int cap = 1024);

/// Applies the requested coupling and returns the reordered target batch.
MatrixXd couple_for_training(CouplingMode mode, const MatrixXd& x0s,
                             const MatrixXd& x1s, int ot_cap = 1024);

/// Minimum-cost assignment on an arbitrary square cost matrix; returns the
/// column assigned to each row.
std::vector<int> hungarian(const MatrixXd& cost);

}  // namespace hrf
