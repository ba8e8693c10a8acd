#include <cstdio>

#include "support/oracles.hpp"
#include "vqst/hamiltonian.hpp"
#include "vqst/metrics.hpp"
#include "vqst/rbm.hpp"
#include "vqst/training.hpp"

using namespace vqst;

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4;
  const double tau = argc > 2 ? std::atof(argv[2]) : 0.5;
  const int hidden = argc > 3 ? std::atoi(argv[3]) : 32;
  const double lr = argc > 4 ? std::atof(argv[4]) : 0.005;
  const std::int64_t samples = argc > 5 ? std::atoll(argv[5]) : 8000;

  XYModelParams params;
  params.qubit_count = n;
  const XYHamiltonian ham = build_hamiltonian(params);
  const StateVector truth = evolve(neel_state(n), ham, tau / params.coupling_j0);
  const MeasurementDataset data = sample_dataset(truth, generate_bases(n), 1000, 7);
  auto [train_view, test_view] = split(data);

  const double sigma = argc > 6 ? std::atof(argv[6]) : 0.01;
  RbmWavefunction r(n, hidden, 1024, 5, sigma);
  TrainConfig cfg;
  cfg.learning_rate = lr;
  cfg.samples_per_epoch = samples;
  AdamState adam(r.parameter_count());
  Eigen::VectorXd p = r.parameters();

  const double truth_loss = dense_loss(truth, test_view);
  std::printf("n=%d tau=%.1f H=%d lr=%g samples=%lld truth_test_loss=%.1f\n", n, tau, hidden, lr,
              static_cast<long long>(samples), truth_loss);
  for (int epoch = 0; epoch <= 4000; ++epoch) {
    r.begin_epoch(samples);
    auto [loss, grad] = r.loss_and_gradient(train_view);
    adam_step(p, grad, adam, cfg);
    r.set_parameters(p);
    if (epoch % 250 == 0) {
      const double fid = fidelity(truth, r.to_dense());
      std::printf("epoch %5d  train %10.1f  test %10.1f  fid %.4f  |S|=%zu  |grad|=%.2e\n", epoch, loss,
                  r.loss(test_view), fid, r.support().size(), grad.norm());
      std::fflush(stdout);
    }
  }
  return 0;
}
