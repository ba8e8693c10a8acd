#include <cstdio>

#include "support/oracles.hpp"
#include "vqst/arn.hpp"

using namespace vqst;

int main() {
  const int n = 4;
  AutoregressiveWavefunction a(n, 41);
  std::vector<std::uint64_t> full(16);
  for (std::uint64_t s = 0; s < 16; ++s) full[s] = s;
  a.set_support(full);

  const StateVector state = oracle::random_state(n, 43);
  const MeasurementDataset data = sample_dataset(state, generate_bases(n), 20, 47);
  const DatasetSlice view = slice_all(data);

  auto [loss, grad] = a.loss_and_gradient(view);
  AutoregressiveWavefunction probe = a;
  const Eigen::VectorXd params = a.parameters();

  for (Eigen::Index idx : {Eigen::Index(317), Eigen::Index(205)}) {
    std::printf("component %lld: analytic %.10f\n", static_cast<long long>(idx), grad(idx));
    for (double h : {1e-4, 1e-5, 1e-6, 1e-7}) {
      Eigen::VectorXd p = params;
      p(idx) += h;
      probe.set_parameters(p);
      const double up = probe.loss(view);
      p(idx) = params(idx) - h;
      probe.set_parameters(p);
      const double down = probe.loss(view);
      std::printf("  h=%.0e  fd %.10f\n", h, (up - down) / (2.0 * h));
    }
  }
  return 0;
}
