#include <cstdio>

#include "support/oracles.hpp"
#include "vqst/arn.hpp"
#include "vqst/hamiltonian.hpp"
#include "vqst/metrics.hpp"
#include "vqst/training.hpp"

using namespace vqst;

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 8;
  const double tau = argc > 2 ? std::atof(argv[2]) : 0.5;
  const double lr = argc > 3 ? std::atof(argv[3]) : 0.005;
  const double sigma = argc > 4 ? std::atof(argv[4]) : 0.05;
  const std::int64_t samples = argc > 5 ? std::atoll(argv[5]) : 8000;

  XYModelParams params;
  params.qubit_count = n;
  const XYHamiltonian ham = build_hamiltonian(params);
  const StateVector truth = evolve(neel_state(n), ham, tau / params.coupling_j0);
  const MeasurementDataset data = sample_dataset(truth, generate_bases(n), 1000, 7);
  auto [train_view, test_view] = split(data);

  AutoregressiveWavefunction a(n, 5, sigma);
  TrainConfig cfg;
  cfg.learning_rate = lr;
  AdamState adam(a.parameter_count());
  Eigen::VectorXd p = a.parameters();

  std::printf("n=%d tau=%.1f lr=%g sigma=%g samples=%lld truth_test=%.1f\n", n, tau, lr, sigma,
              static_cast<long long>(samples), dense_loss(truth, test_view));
  for (int epoch = 0; epoch <= 2000; ++epoch) {
    a.begin_epoch(samples);
    auto [loss, grad] = a.loss_and_gradient(train_view);
    adam_step(p, grad, adam, cfg);
    a.set_parameters(p);
    if (epoch % 250 == 0) {
      std::printf("epoch %5d  train %10.1f  test %10.1f  fid %.4f  |S|=%zu\n", epoch, loss,
                  a.loss(test_view), fidelity(truth, a.to_dense()), a.support().size());
      std::fflush(stdout);
    }
  }
  return 0;
}
