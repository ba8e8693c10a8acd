#include <cstdio>

#include "support/oracles.hpp"
#include "vqst/arn.hpp"
#include "vqst/hamiltonian.hpp"
#include "vqst/training.hpp"

using namespace vqst;

int main(int argc, char** argv) {
  const int n = 8;
  XYModelParams params;
  params.qubit_count = n;
  const XYHamiltonian ham = build_hamiltonian(params);
  const double tau = argc > 1 ? std::atof(argv[1]) : 2.5;
  const StateVector target = evolve(neel_state(n), ham, tau / params.coupling_j0);

  for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
    for (double lr : {0.005, 0.01, 0.02}) {
      AutoregressiveWavefunction a(n, seed);
      TrainConfig cfg;
      cfg.learning_rate = lr;
      cfg.max_epochs = 5000;
      cfg.patience = 5000;
      cfg.fidelity_stop = 0.992;
      const TrainResult r = train_fidelity(a, target, cfg);
      double best = 0.0;
      for (const auto& pt : r.curve) best = std::max(best, pt.fidelity);
      std::printf("tau=%.1f seed=%llu lr=%.3f epochs=%zu best_fid=%.5f fid@1000=%.5f fid@3000=%.5f\n",
                  tau, static_cast<unsigned long long>(seed), lr, r.curve.size(), best,
                  r.curve.size() > 1000 ? r.curve[1000].fidelity : r.curve.back().fidelity,
                  r.curve.size() > 3000 ? r.curve[3000].fidelity : r.curve.back().fidelity);
      std::fflush(stdout);
    }
  }
  return 0;
}
