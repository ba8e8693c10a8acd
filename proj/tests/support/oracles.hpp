#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "vqst/core.hpp"
#include "vqst/hamiltonian.hpp"
#include "vqst/rng.hpp"

namespace oracle {

using vqst::Complex;

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

// Full 2^N x 2^N rotation matrix built by explicit Kronecker products.
inline Eigen::MatrixXcd dense_rotation(const vqst::PauliString& basis) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(1, 1);
  for (vqst::Pauli p : basis) u = kron(u, vqst::rotation_matrix(p));
  return u;
}

inline vqst::StateVector random_state(int n, std::uint64_t seed) {
  auto gen = vqst::rng_stream(seed, 999);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd amps(std::int64_t(1) << n);
  for (Eigen::Index k = 0; k < amps.size(); ++k) amps(k) = Complex(gauss(gen), gauss(gen));
  vqst::StateVector state(n, std::move(amps));
  state.normalize();
  return state;
}

// Dense Hermitian eigendecomposition propagator exp(-iHt)v.
inline Eigen::VectorXcd expm_dense(const Eigen::MatrixXd& h, const Eigen::VectorXcd& v, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) phases(k) = std::exp(Complex(0.0, -t * eig.eigenvalues()(k)));
  return eig.eigenvectors().cast<Complex>() *
         (phases.asDiagonal() * (eig.eigenvectors().transpose().cast<Complex>() * v));
}

// Central finite differences of a scalar function over a parameter vector.
inline Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                                  Eigen::VectorXd params, double step = 1e-5) {
  Eigen::VectorXd grad(params.size());
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    const double saved = params(k);
    params(k) = saved + step;
    const double up = f(params);
    params(k) = saved - step;
    const double down = f(params);
    params(k) = saved;
    grad(k) = (up - down) / (2.0 * step);
  }
  return grad;
}

// Max relative error with the denominator floored at 1e-3 of the gradient
// scale: components far below the dominant magnitude carry the central
// difference's own noise, while any formula error shows up at O(1) on the
// dominant components.
inline double max_relative_error(const Eigen::VectorXd& got, const Eigen::VectorXd& expected) {
  const double scale = std::max({got.cwiseAbs().maxCoeff(), expected.cwiseAbs().maxCoeff(), 1e-3});
  const double floor = 1e-3 * scale;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < got.size(); ++k) {
    const double denom = std::max({std::abs(got(k)), std::abs(expected(k)), floor});
    worst = std::max(worst, std::abs(got(k) - expected(k)) / denom);
  }
  return worst;
}

}  // namespace oracle
