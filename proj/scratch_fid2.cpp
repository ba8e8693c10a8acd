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

  for (double sigma : {0.05, 0.2, 0.5}) {
    for (std::uint64_t seed : {41ull, 42ull, 43ull, 44ull}) {
      AutoregressiveWavefunction a(n, seed);
      if (sigma != 0.05) {
        auto gen = rng_stream(seed, 600);
        std::normal_distribution<double> gauss(0.0, sigma);
        Eigen::VectorXd p(a.parameter_count());
        for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = gauss(gen);
        a.set_parameters(p);
      }
      TrainConfig cfg;
      cfg.max_epochs = 5000;
      cfg.patience = 5000;
      cfg.fidelity_stop = 0.992;
      const TrainResult r = train_fidelity(a, target, cfg);
      double best = 0.0;
      for (const auto& pt : r.curve) best = std::max(best, pt.fidelity);
      std::printf("tau=%.1f sigma=%.2f seed=%llu epochs=%zu best=%.5f\n", tau, sigma,
                  static_cast<unsigned long long>(seed), r.curve.size(), best);
      std::fflush(stdout);
    }
  }
  return 0;
}
