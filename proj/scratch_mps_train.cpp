#include <cstdio>

#include "support/oracles.hpp"
#include "vqst/hamiltonian.hpp"
#include "vqst/metrics.hpp"
#include "vqst/mps.hpp"
#include "vqst/training.hpp"

using namespace vqst;

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 8;
  const double tau = argc > 2 ? std::atof(argv[2]) : 0.5;
  const double lr = argc > 3 ? std::atof(argv[3]) : 0.005;
  const int max_epochs = argc > 4 ? std::atoi(argv[4]) : 1500;

  XYModelParams params;
  params.qubit_count = n;
  const XYHamiltonian ham = build_hamiltonian(params);
  const StateVector truth = evolve(neel_state(n), ham, tau / params.coupling_j0);
  const MeasurementDataset data = sample_dataset(truth, generate_bases(n), 1000, 7);

  const int chi = argc > 5 ? std::atoi(argv[5]) : 10;
  MatrixProductState m = MatrixProductState::random(n, chi, 5);
  TrainConfig cfg;
  cfg.learning_rate = lr;
  cfg.max_epochs = max_epochs;
  cfg.patience = 50;
  const TrainResult r = train(m, data, cfg, &truth);
  double maxfid = 0.0;
  for (const auto& pt : r.curve) maxfid = std::max(maxfid, pt.fidelity);
  std::printf("chi=%d n=%d tau=%.1f lr=%g stop=%d epochs=%zu fid@best=%.4f maxfid=%.4f\n", chi, n, tau, lr,
              r.best_epoch, r.curve.size(), r.curve[r.best_epoch].fidelity, maxfid);
  return 0;
}
