#include <cstdio>

#include "support/oracles.hpp"
#include "vqst/arn.hpp"

using namespace vqst;

int main() {
  const int n = 4;
  AutoregressiveWavefunction a(n, 233);
  auto gen = rng_stream(233, 503);
  std::normal_distribution<double> gauss(0.0, 0.3);
  Eigen::VectorXd p0(a.parameter_count());
  for (Eigen::Index k = 0; k < p0.size(); ++k) p0(k) = gauss(gen);
  a.set_parameters(p0);
  std::vector<std::uint64_t> full(16);
  for (std::uint64_t s = 0; s < 16; ++s) full[s] = s;
  a.set_support(full);
  const MeasurementDataset data = sample_dataset(a.to_dense(), generate_bases(n), 20, 223);
  const DatasetSlice view = slice_all(data);

  auto [loss, grad] = a.loss_and_gradient(view);
  AutoregressiveWavefunction probe = a;
  const Eigen::VectorXd fd = oracle::finite_difference_gradient(
      [&](const Eigen::VectorXd& p) {
        probe.set_parameters(p);
        return probe.loss(view);
      },
      a.parameters());

  Eigen::Index worst = 0;
  double worst_err = 0.0;
  for (Eigen::Index k = 0; k < grad.size(); ++k) {
    const double denom = std::max({std::abs(grad(k)), std::abs(fd(k)), 1e-6});
    const double err = std::abs(grad(k) - fd(k)) / denom;
    if (err > worst_err) { worst_err = err; worst = k; }
  }
  std::printf("worst %lld err %.6g (analytic %.8f fd %.8f)\n", (long long)worst, worst_err, grad(worst), fd(worst));
  const Eigen::VectorXd params = a.parameters();
  for (double h : {1e-5, 1e-6, 1e-7}) {
    Eigen::VectorXd q = params;
    q(worst) += h;
    probe.set_parameters(q);
    const double up = probe.loss(view);
    q(worst) = params(worst) - h;
    probe.set_parameters(q);
    const double down = probe.loss(view);
    std::printf("  h=%.0e fd %.8f\n", h, (up - down) / (2.0 * h));
  }
  // min record probability under the model
  double minp = 1.0;
  Eigen::VectorXcd psi(16);
  for (std::uint64_t s = 0; s < 16; ++s) psi(s) = a.amplitude(s);
  for (std::size_t b = 0; b < view.records.size(); ++b) {
    const Eigen::VectorXcd w = support_rotated_amplitudes(full, psi, n, (*view.bases)[b]);
    for (std::uint64_t j : view.records[b]) minp = std::min(minp, std::norm(w(j)));
  }
  std::printf("min record probability %.3e\n", minp);
  std::printf("||fd||_inf = %.6f  ||grad||_inf = %.6f  |diff|_inf = %.3e\n",
              fd.cwiseAbs().maxCoeff(), grad.cwiseAbs().maxCoeff(), (grad - fd).cwiseAbs().maxCoeff());
  return 0;
}
// extra diagnostics appended
