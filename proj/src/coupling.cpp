#include "hrf/coupling.hpp"

#include <limits>

namespace hrf {

namespace {

double mean_pair_cost(const MatrixXd& x0s, const MatrixXd& x1s,
                      const std::vector<int>& perm) {
  double c = 0.0;
  for (Eigen::Index i = 0; i < x0s.rows(); ++i)
    c += (x1s.row(perm[i]) - x0s.row(i)).squaredNorm();
  return c / static_cast<double>(x0s.rows());
}

void check_batches(const MatrixXd& x0s, const MatrixXd& x1s) {
  if (x0s.rows() != x1s.rows() || x0s.cols() != x1s.cols())
    throw ConfigError("coupling requires equal batch shapes");
  if (x0s.rows() < 1) throw ConfigError("coupling requires a nonempty batch");
}

}  // namespace

std::vector<int> hungarian(const MatrixXd& cost) {
  // Shortest augmenting path formulation with row/column potentials, O(n^3).
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

BatchCoupling independent_coupling(const MatrixXd& x0s, const MatrixXd& x1s) {
  check_batches(x0s, x1s);
  BatchCoupling c;
  c.perm.resize(x0s.rows());
  for (Eigen::Index i = 0; i < x0s.rows(); ++i)
    c.perm[i] = static_cast<int>(i);
  c.transport_cost = mean_pair_cost(x0s, x1s, c.perm);
  return c;
}

BatchCoupling ot_coupling(const MatrixXd& x0s, const MatrixXd& x1s, int cap) {
  check_batches(x0s, x1s);
  const Eigen::Index n = x0s.rows();
  if (n > cap)
    throw ConfigError(
        "OT coupling batch exceeds the configured cap; use a smaller OT "
        "sub-batch");
  MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = (x1s.row(j) - x0s.row(i)).squaredNorm();
  BatchCoupling c;
  c.perm = hungarian(cost);
  c.transport_cost = mean_pair_cost(x0s, x1s, c.perm);
  return c;
}

MatrixXd couple_for_training(CouplingMode mode, const MatrixXd& x0s,
                             const MatrixXd& x1s, int ot_cap) {
  if (mode == CouplingMode::Independent) return x1s;
  const BatchCoupling c = ot_coupling(x0s, x1s, ot_cap);
  MatrixXd out(x1s.rows(), x1s.cols());
  for (Eigen::Index i = 0; i < x1s.rows(); ++i)
    out.row(i) = x1s.row(c.perm[i]);
  return out;
}

}  // namespace hrf
