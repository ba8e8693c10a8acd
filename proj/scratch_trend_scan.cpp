#include <cstdio>
#include <cstring>

#include "support/oracles.hpp"
#include "vqst/arn.hpp"
#include "vqst/hamiltonian.hpp"
#include "vqst/metrics.hpp"
#include "vqst/mps.hpp"
#include "vqst/rbm.hpp"
#include "vqst/training.hpp"

using namespace vqst;

int main(int argc, char** argv) {
  const char* kind = argc > 1 ? argv[1] : "arn";
  const double lr = argc > 2 ? std::atof(argv[2]) : 0.005;
  const double sigma = argc > 3 ? std::atof(argv[3]) : 0.2;
  const int max_epochs = argc > 4 ? std::atoi(argv[4]) : 2000;
  const int chi = argc > 5 ? std::atoi(argv[5]) : 16;

  const int n = 8;
  XYModelParams params;
  params.qubit_count = n;
  const XYHamiltonian ham = build_hamiltonian(params);

  for (double tau : {0.5, 1.5, 2.5, 3.5}) {
    const StateVector truth = evolve(neel_state(n), ham, tau / params.coupling_j0);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      std::uint64_t mix = seed + static_cast<std::uint64_t>(tau * 1000);
      const MeasurementDataset data = sample_dataset(truth, generate_bases(n), 1000, splitmix64(mix));
      TrainConfig cfg;
      cfg.learning_rate = lr;
      cfg.max_epochs = max_epochs;
      cfg.patience = 50;
      cfg.samples_per_epoch = 8000;
      TrainResult r;
      StateVector dense;
      if (std::strcmp(kind, "mps") == 0) {
        MatrixProductState m = MatrixProductState::random(n, chi, seed);
        r = train(m, data, cfg, &truth);
        dense = m.to_dense();
      } else if (std::strcmp(kind, "rbm") == 0) {
        RbmWavefunction m(n, 64, 1024, seed, sigma);
        r = train(m, data, cfg, &truth);
        dense = m.to_dense();
      } else {
        AutoregressiveWavefunction m(n, seed, sigma);
        r = train(m, data, cfg, &truth);
        dense = m.to_dense();
      }
      double maxfid = 0.0;
      for (const auto& pt : r.curve) maxfid = std::max(maxfid, pt.fidelity);
      auto [train_view, test_view] = split(data);
      std::printf("%s tau=%.1f seed=%llu fid=%.4f maxfid=%.4f ldiff=%.1f stop=%d/%zu\n", kind, tau,
                  static_cast<unsigned long long>(seed), r.curve[r.best_epoch].fidelity, maxfid,
                  loss_difference(truth, dense, test_view), r.best_epoch, r.curve.size());
      std::fflush(stdout);
    }
  }
  return 0;
}
