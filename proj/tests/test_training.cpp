#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "support/oracles.hpp"
#include "vqst/arn.hpp"
#include "vqst/hamiltonian.hpp"
#include "vqst/measurement.hpp"
#include "vqst/mps.hpp"
#include "vqst/training.hpp"

using namespace vqst;
using Catch::Approx;

namespace {

StateVector random_product_state(int n, std::uint64_t seed) {
  auto gen = rng_stream(seed, 777);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Ones(1);
  for (int site = 0; site < n; ++site) {
    const double theta = std::acos(2.0 * uniform_double(gen) - 1.0);
    const double phi = 2.0 * std::numbers::pi * uniform_double(gen);
    Eigen::Vector2cd q;
    q << std::cos(theta / 2.0), std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0);
    Eigen::VectorXcd next(amps.size() * 2);
    for (Eigen::Index k = 0; k < amps.size(); ++k) {
      next(2 * k) = amps(k) * q(0);
      next(2 * k + 1) = amps(k) * q(1);
    }
    amps = std::move(next);
  }
  return StateVector(n, std::move(amps));
}

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged", "[training]") {
  TrainConfig cfg;
  Eigen::VectorXd params = Eigen::VectorXd::Constant(4, 1.5);
  AdamState state(4);
  state.m = Eigen::VectorXd::Constant(4, 0.3);
  state.v = Eigen::VectorXd::Constant(4, 0.2);
  const Eigen::VectorXd before_m = state.m;
  adam_step(params, Eigen::VectorXd::Zero(4), state, cfg);
  // the accumulated moment still nudges params, but with a zero moment the
  // update is exactly zero
  AdamState fresh(4);
  Eigen::VectorXd params2 = Eigen::VectorXd::Constant(4, 1.5);
  adam_step(params2, Eigen::VectorXd::Zero(4), fresh, cfg);
  REQUIRE((params2.array() == 1.5).all());
  REQUIRE((state.m - cfg.beta1 * before_m).cwiseAbs().maxCoeff() < 1e-15);  // moments decay
}

TEST_CASE("adam: constant gradient drifts at the learning rate", "[training]") {
  TrainConfig cfg;
  Eigen::VectorXd params = Eigen::VectorXd::Zero(1);
  AdamState state(1);
  const Eigen::VectorXd grad = Eigen::VectorXd::Constant(1, 2.7);
  double prev = params(0);
  for (int k = 0; k < 200; ++k) {
    adam_step(params, grad, state, cfg);
    const double step = params(0) - prev;
    prev = params(0);
    REQUIRE(step < 0.0);  // opposite sign(g)
    if (k > 50) REQUIRE(std::abs(step) == Approx(cfg.learning_rate).epsilon(0.05));
  }
}

TEST_CASE("adam: scalar quadratic converges", "[training]") {
  TrainConfig cfg;  // gamma = 0.005
  Eigen::VectorXd params = Eigen::VectorXd::Constant(1, 2.0);
  AdamState state(1);
  const double target = -0.7;
  int steps = 0;
  for (; steps < 5000; ++steps) {
    Eigen::VectorXd grad(1);
    grad(0) = 2.0 * (params(0) - target);  // d/dx (x - target)^2
    adam_step(params, grad, state, cfg);
    if (std::abs(params(0) - target) < 1e-6) break;
  }
  REQUIRE(std::abs(params(0) - target) < 1e-6);
  REQUIRE(steps < 5000);
}

TEST_CASE("adam rejects non-finite gradients", "[training]") {
  TrainConfig cfg;
  Eigen::VectorXd params = Eigen::VectorXd::Zero(3);
  AdamState state(3);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(3);
  grad(1) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_WITH(adam_step(params, grad, state, cfg), Catch::Matchers::ContainsSubstring("index 1"));
}

TEST_CASE("mps training recovers a product state", "[training]") {
  const int n = 6;
  const StateVector truth = random_product_state(n, 101);
  const MeasurementDataset data = sample_dataset(truth, generate_bases(n), 1000, 103);

  MatrixProductState mps = MatrixProductState::random(n, 10, 107);
  TrainConfig cfg;
  cfg.max_epochs = 500;
  cfg.patience = 50;
  const TrainResult result = train(mps, data, cfg, &truth);

  REQUIRE(fidelity(truth, mps.to_dense()) >= 0.99);

  // best epoch attains the minimum recorded test loss
  for (const auto& pt : result.curve) REQUIRE(result.best_test_loss <= pt.test_loss + 1e-12);
  REQUIRE(result.curve[result.best_epoch].test_loss == result.best_test_loss);

  // descent sanity: training loss after 50 epochs is below the epoch-0 loss
  REQUIRE(result.curve.size() > 50);
  REQUIRE(result.curve[50].train_loss < result.curve[0].train_loss);
}

TEST_CASE("training is deterministic given the seed", "[training]") {
  const int n = 4;
  const StateVector truth = oracle::random_state(n, 111);
  const MeasurementDataset data = sample_dataset(truth, generate_bases(n), 40, 113);

  TrainConfig cfg;
  cfg.max_epochs = 25;
  cfg.samples_per_epoch = 500;

  LearningCurve curves[2];
  for (int run = 0; run < 2; ++run) {
    AutoregressiveWavefunction arn(n, 127);
    const TrainResult r = train(arn, data, cfg);
    curves[run] = r.curve;
  }
  REQUIRE(curves[0].size() == curves[1].size());
  for (std::size_t k = 0; k < curves[0].size(); ++k) {
    REQUIRE(curves[0][k].epoch == curves[1][k].epoch);
    REQUIRE(curves[0][k].train_loss == curves[1][k].train_loss);
    REQUIRE(curves[0][k].test_loss == curves[1][k].test_loss);
  }
}

TEST_CASE("train_fidelity stops immediately on a perfect target", "[training]") {
  AutoregressiveWavefunction arn(4, 131);
  const StateVector target = arn.to_dense();
  TrainConfig cfg;
  cfg.max_epochs = 100;
  const TrainResult r = train_fidelity(arn, target, cfg);
  REQUIRE(r.curve.size() == 1);
  REQUIRE(r.curve[0].fidelity == Approx(1.0).margin(1e-9));
}

TEST_CASE("train_fidelity improves the fidelity", "[training]") {
  AutoregressiveWavefunction arn(4, 137);
  const StateVector target = oracle::random_state(4, 139);
  TrainConfig cfg;
  cfg.max_epochs = 400;
  cfg.patience = 100;
  cfg.fidelity_stop = 0.995;
  const TrainResult r = train_fidelity(arn, target, cfg);
  REQUIRE(r.curve.back().fidelity > r.curve.front().fidelity);
  REQUIRE(-r.best_test_loss >= r.curve.front().fidelity);
}

TEST_CASE("learning-curve csv has the exact column header", "[training]") {
  LearningCurve curve;
  curve.push_back({0, 1.5, 1.6, 0.5, 0.01});
  curve.push_back({1, 1.4, 1.55, std::numeric_limits<double>::quiet_NaN(), 0.02});
  const std::string path = "test_curve.csv";
  write_curve_csv(path, curve);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "epoch,train_loss,test_loss,fidelity,seconds");
  std::string row;
  std::getline(in, row);
  REQUIRE(row.rfind("0,1.5,1.6,0.5,", 0) == 0);
  std::remove(path.c_str());
}
