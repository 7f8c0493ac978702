#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hrf/mlp.hpp"

using namespace hrf;

namespace {

MlpConfig tiny_config(int depth, int space_dim, Activation act) {
  MlpConfig cfg;
  cfg.depth = depth;
  cfg.space_dim = space_dim;
  cfg.embed_dim = 4;
  cfg.slot_width = 8;
  cfg.trunk_hidden = {16, 16};
  cfg.activation = act;
  return cfg;
}

void random_inputs(const MlpConfig& cfg, Eigen::Index n, Rng& rng,
                   std::vector<MatrixXd>& spaces, std::vector<VectorXd>& times) {
  spaces.resize(cfg.depth);
  times.resize(cfg.depth);
  for (int d = 0; d < cfg.depth; ++d) {
    spaces[d] = rng.normal_mat(n, cfg.space_dim);
    times[d] = VectorXd::NullaryExpr(n, [&rng](Eigen::Index) {
      return rng.uniform();
    });
  }
}

}  // namespace

TEST_CASE("sinusoidal embedding layout") {
  const VectorXd e = sinusoidal_embed(0.0, 8);
  for (int i = 0; i < 4; ++i) {
    CHECK(e[i] == doctest::Approx(0.0));      // sin half
    CHECK(e[4 + i] == doctest::Approx(1.0));  // cos half
  }
  // lowest and highest frequencies are 1 and 1000
  const double t = 0.37;
  const VectorXd et = sinusoidal_embed(t, 8);
  CHECK(et[0] == doctest::Approx(std::sin(t)));
  CHECK(et[3] == doctest::Approx(std::sin(1000.0 * t)));
  CHECK(et[4] == doctest::Approx(std::cos(t)));

  CHECK_THROWS_AS(sinusoidal_embed(0.5, 7), ConfigError);
  CHECK_THROWS_AS(sinusoidal_embed(0.5, 0), ConfigError);
}

TEST_CASE("batched embedding matches scalar") {
  VectorXd ts(3);
  ts << 0.1, 0.5, 0.93;
  const MatrixXd batch = sinusoidal_embed(ts, 16);
  for (int i = 0; i < 3; ++i) {
    const VectorXd one = sinusoidal_embed(ts[i], 16);
    CHECK((batch.row(i).transpose() - one).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("default architecture parameter count") {
  Rng rng(0);
  const Mlp net(MlpConfig{}, rng);
  CHECK(net.param_count() == 74625);
  // within 20% of the reference synthetic-experiment budget
  CHECK(std::abs(static_cast<double>(net.param_count()) - 74497.0) / 74497.0 <
        0.2);
}

TEST_CASE("forward is deterministic and reproducible from the seed") {
  Rng rng1(0), rng2(0);
  const Mlp a(MlpConfig{}, rng1);
  const Mlp b(MlpConfig{}, rng2);
  CHECK(a.params() == b.params());

  std::vector<MatrixXd> spaces = {MatrixXd::Constant(1, 1, 0.5),
                                  MatrixXd::Constant(1, 1, -0.1)};
  std::vector<VectorXd> times = {VectorXd::Constant(1, 0.3),
                                 VectorXd::Constant(1, 0.7)};
  const double out = a.forward(spaces, times)(0, 0);
  // regression pin captured at first build
  CHECK(out == doctest::Approx(0.0053311627272823944).epsilon(1e-14));
}

TEST_CASE("backward matches central finite differences") {
  Rng rng(42);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int depth = 1 + static_cast<int>(rng.integer(3));
    const int dim = 1 + static_cast<int>(rng.integer(2));
    const auto act =
        rng.uniform() < 0.5 ? Activation::SmoothGate : Activation::Tanh;
    const MlpConfig cfg = tiny_config(depth, dim, act);
    Mlp net(cfg, rng);

    const Eigen::Index n = 3;
    std::vector<MatrixXd> spaces;
    std::vector<VectorXd> times;
    random_inputs(cfg, n, rng, spaces, times);
    const MatrixXd grad_out = rng.normal_mat(n, dim);

    MlpCache cache;
    net.forward(spaces, times, &cache);
    VectorXd grad;
    net.backward(cache, grad_out, grad);
    const VectorXd fd = net.finite_diff_grad(spaces, times, grad_out, 1e-5);

    for (Eigen::Index i = 0; i < grad.size(); ++i) {
      const double rel = std::abs(grad[i] - fd[i]) /
                         std::max({std::abs(grad[i]), std::abs(fd[i]), 1e-4});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("input-space gradients match finite differences") {
  Rng rng(7);
  const MlpConfig cfg = tiny_config(2, 2, Activation::SmoothGate);
  Mlp net(cfg, rng);

  std::vector<MatrixXd> spaces;
  std::vector<VectorXd> times;
  random_inputs(cfg, 2, rng, spaces, times);
  const MatrixXd grad_out = rng.normal_mat(2, 2);

  MlpCache cache;
  net.forward(spaces, times, &cache);
  VectorXd grad_theta;
  std::vector<MatrixXd> grad_spaces;
  net.backward(cache, grad_out, grad_theta, &grad_spaces);

  const double eps = 1e-6;
  for (int d = 0; d < cfg.depth; ++d)
    for (Eigen::Index r = 0; r < 2; ++r)
      for (Eigen::Index c = 0; c < cfg.space_dim; ++c) {
        auto probe = spaces;
        probe[d](r, c) += eps;
        const double hi =
            (net.forward(probe, times).array() * grad_out.array()).sum();
        probe[d](r, c) -= 2 * eps;
        const double lo =
            (net.forward(probe, times).array() * grad_out.array()).sum();
        const double fd = (hi - lo) / (2 * eps);
        CHECK(grad_spaces[d](r, c) ==
              doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
}

TEST_CASE("shape validation") {
  Rng rng(1);
  const MlpConfig cfg = tiny_config(2, 1, Activation::Tanh);
  const Mlp net(cfg, rng);
  std::vector<MatrixXd> spaces = {MatrixXd::Zero(2, 1)};
  std::vector<VectorXd> times = {VectorXd::Zero(2)};
  CHECK_THROWS_AS(net.forward(spaces, times), ShapeError);

  spaces = {MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 2)};
  times = {VectorXd::Zero(2), VectorXd::Zero(2)};
  CHECK_THROWS_AS(net.forward(spaces, times), ShapeError);

  MlpConfig bad = cfg;
  bad.embed_dim = 5;
  CHECK_THROWS_AS(Mlp(bad, rng), ConfigError);
}

TEST_CASE("adam drives a quadratic to its minimum") {
  VectorXd theta = VectorXd::Constant(4, 10.0);
  AdamState adam = AdamState::init(4, 0.1);
  for (int i = 0; i < 2000; ++i) {
    const VectorXd grad = 2.0 * (theta.array() - 3.0).matrix();
    adam_step(adam, theta, grad, i);
  }
  CHECK((theta.array() - 3.0).abs().maxCoeff() < 1e-4);
}

TEST_CASE("adam rejects non-finite gradients with the iteration tag") {
  VectorXd theta = VectorXd::Zero(2);
  AdamState adam = AdamState::init(2, 0.1);
  VectorXd grad(2);
  grad << 1.0, std::numeric_limits<double>::quiet_NaN();
  try {
    adam_step(adam, theta, grad, 17);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(e.iteration == 17);
  }
}

TEST_CASE("zero-init of the last layer gives zero output") {
  MlpConfig cfg = tiny_config(2, 1, Activation::SmoothGate);
  cfg.zero_init_last = true;
  Rng rng(3);
  const Mlp net(cfg, rng);
  std::vector<MatrixXd> spaces;
  std::vector<VectorXd> times;
  random_inputs(cfg, 4, rng, spaces, times);
  CHECK(net.forward(spaces, times).cwiseAbs().maxCoeff() == 0.0);
}
