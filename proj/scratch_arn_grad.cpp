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
  std::printf("loss = %.12f\n", loss);

  AutoregressiveWavefunction probe = a;
  const Eigen::VectorXd fd = oracle::finite_difference_gradient(
      [&probe, &view](const Eigen::VectorXd& p) {
        probe.set_parameters(p);
        return probe.loss(view);
      },
      a.parameters());

  // block boundaries: w1 (3n x n), b1 (3n), w2 (3n x 3n), b2 (3n), w3 (2n x 3n), b3 (2n)
  const int hidden = 3 * n;
  struct Block { const char* name; Eigen::Index size; };
  Block blocks[] = {{"w1", hidden * n}, {"b1", hidden},  {"w2", hidden * hidden},
                    {"b2", hidden},     {"w3", 2 * n * hidden}, {"b3", 2 * n}};
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    double worst = 0.0;
    Eigen::Index worst_k = -1;
    for (Eigen::Index k = off; k < off + b.size; ++k) {
      const double denom = std::max({std::abs(grad(k)), std::abs(fd(k)), 1e-6});
      const double err = std::abs(grad(k) - fd(k)) / denom;
      if (err > worst) {
        worst = err;
        worst_k = k;
      }
    }
    std::printf("%-3s worst rel err %.6f at %lld  (grad %.8f vs fd %.8f)\n", b.name, worst,
                static_cast<long long>(worst_k), worst_k >= 0 ? grad(worst_k) : 0.0,
                worst_k >= 0 ? fd(worst_k) : 0.0);
    off += b.size;
  }
  return 0;
}
