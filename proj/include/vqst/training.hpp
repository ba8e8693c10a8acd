#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqst/core.hpp"
#include "vqst/measurement.hpp"

namespace vqst {

struct TrainConfig {
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 1000;
  int patience = 50;                    // epochs without a new test-loss minimum
  std::int64_t samples_per_epoch = 30000;  // NNQS ansaetze only
  std::uint64_t seed = 0;
  int checkpoint_every = 0;             // 0 = only the final best checkpoint
  double divergence_factor = 10.0;      // abort if loss exceeds this multiple of its initial value
  double fidelity_stop = 1.0 - 1e-9;    // train_fidelity halts at this fidelity

  void validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
    if (samples_per_epoch < 1) throw std::invalid_argument("TrainConfig: samples_per_epoch must be >= 1");
  }
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t t = 0;

  explicit AdamState(Eigen::Index size) : m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)) {}
};

// Standard ADAM update with bias correction; deterministic in its inputs.
inline void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state,
                      const TrainConfig& cfg) {
  if (params.size() != grad.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  if (!grad.allFinite()) {
    Eigen::Index bad = 0;
    for (Eigen::Index k = 0; k < grad.size(); ++k)
      if (!std::isfinite(grad(k))) {
        bad = k;
        break;
      }
    throw std::runtime_error("adam_step: non-finite gradient component at index " + std::to_string(bad));
  }
  ++state.t;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double mc = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double vc = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  params.array() -= cfg.learning_rate * (state.m.array() / mc) /
                    ((state.v.array() / vc).sqrt() + cfg.epsilon);
}

struct CurvePoint {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

using LearningCurve = std::vector<CurvePoint>;

inline void write_curve_csv(const std::string& path, const LearningCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_curve_csv: cannot open " + path);
  out << "epoch,train_loss,test_loss,fidelity,seconds\n";
  out.precision(12);
  for (const auto& p : curve)
    out << p.epoch << "," << p.train_loss << "," << p.test_loss << "," << p.fidelity << "," << p.seconds << "\n";
}

struct TrainResult {
  LearningCurve curve;
  int best_epoch = -1;
  double best_test_loss = std::numeric_limits<double>::infinity();
};

// Maximum-likelihood training loop: per epoch the NNQS ansaetze refresh their
// sample support, a full-batch gradient is taken on the training split, one
// ADAM step is applied, and the test loss (plus fidelity when a ground truth
// is supplied) is recorded. Stops after `patience` epochs without a new
// test-loss minimum and restores the parameters from that minimum.
template <typename Ansatz>
TrainResult train(Ansatz& ansatz, const MeasurementDataset& data, const TrainConfig& cfg,
                  const StateVector* ground_truth = nullptr,
                  const std::function<void(const Ansatz&, int)>& on_checkpoint = {}) {
  cfg.validate();
  auto [train_view, test_view] = split(data);

  Eigen::VectorXd params = ansatz.parameters();
  AdamState adam(params.size());
  TrainResult result;
  Eigen::VectorXd best_params = params;
  int since_best = 0;
  double initial_loss = std::numeric_limits<double>::quiet_NaN();
  const auto t0 = std::chrono::steady_clock::now();

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    ansatz.begin_epoch(cfg.samples_per_epoch);
    auto [train_loss, grad] = ansatz.loss_and_gradient(train_view);
    if (!std::isfinite(train_loss)) throw std::runtime_error("train: loss diverged (non-finite)");
    if (epoch == 0) initial_loss = train_loss;
    if (train_loss > cfg.divergence_factor * std::max(std::abs(initial_loss), 1.0))
      throw std::runtime_error("train: loss diverged past " + std::to_string(cfg.divergence_factor) +
                               "x its initial value at epoch " + std::to_string(epoch));

    adam_step(params, grad, adam, cfg);
    ansatz.set_parameters(params);

    const double test_loss = ansatz.loss(test_view);
    CurvePoint point;
    point.epoch = epoch;
    point.train_loss = train_loss;
    point.test_loss = test_loss;
    if (ground_truth) point.fidelity = fidelity(*ground_truth, ansatz.to_dense());
    point.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.curve.push_back(point);

    if (test_loss < result.best_test_loss) {
      result.best_test_loss = test_loss;
      result.best_epoch = epoch;
      best_params = params;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (on_checkpoint && cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0)
      on_checkpoint(ansatz, epoch);
    if (since_best >= cfg.patience) break;
  }

  ansatz.set_parameters(best_params);
  return result;
}

// Diagnostic: ADAM on the negative-fidelity objective against a known target
// state. Never used for data reconstruction.
template <typename Ansatz>
TrainResult train_fidelity(Ansatz& ansatz, const StateVector& target, const TrainConfig& cfg) {
  cfg.validate();
  Eigen::VectorXd params = ansatz.parameters();
  AdamState adam(params.size());
  TrainResult result;
  Eigen::VectorXd best_params = params;
  int since_best = 0;
  const auto t0 = std::chrono::steady_clock::now();

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    auto [objective, grad] = ansatz.fidelity_objective(target);
    if (!std::isfinite(objective)) throw std::runtime_error("train_fidelity: objective diverged");

    CurvePoint point;
    point.epoch = epoch;
    point.train_loss = objective;
    point.test_loss = objective;
    point.fidelity = -objective;
    point.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.curve.push_back(point);

    if (objective < result.best_test_loss) {
      result.best_test_loss = objective;
      result.best_epoch = epoch;
      best_params = params;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (-objective >= cfg.fidelity_stop) break;
    if (since_best >= cfg.patience) break;

    adam_step(params, grad, adam, cfg);
    ansatz.set_parameters(params);
  }

  ansatz.set_parameters(best_params);
  return result;
}

}  // namespace vqst
