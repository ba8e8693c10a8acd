#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqst/bits.hpp"

namespace vqst {

using Complex = std::complex<double>;

enum class Pauli : std::uint8_t { X, Y, Z };

inline char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  throw std::logic_error("pauli_char: bad label");
}

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
  }
  throw std::invalid_argument("pauli_from_char: expected X/Y/Z, got '" + std::string(1, c) + "'");
}

// One single-qubit measurement setting per site, e.g. "XYZXYZ..".
using PauliString = std::vector<Pauli>;

inline std::string pauli_string_to_string(const PauliString& p) {
  std::string s;
  s.reserve(p.size());
  for (Pauli q : p) s.push_back(pauli_char(q));
  return s;
}

inline PauliString parse_pauli_string(const std::string& s) {
  PauliString p;
  p.reserve(s.size());
  for (char c : s) p.push_back(pauli_from_char(c));
  return p;
}

// Dense pure state over the 2^N computational-basis configurations.
struct StateVector {
  int qubit_count = 0;
  Eigen::VectorXcd amplitudes;

  StateVector() = default;
  StateVector(int n, Eigen::VectorXcd amps) : qubit_count(n), amplitudes(std::move(amps)) {
    if (amplitudes.size() != dim()) throw std::invalid_argument("StateVector: amplitude count != 2^N");
  }

  std::int64_t dim() const { return std::int64_t(1) << qubit_count; }

  double norm() const { return amplitudes.norm(); }

  bool is_normalized(double tol = 1e-10) const { return std::abs(amplitudes.squaredNorm() - 1.0) <= tol; }

  void normalize() {
    double nrm = norm();
    if (nrm == 0.0) throw std::runtime_error("StateVector::normalize: zero vector");
    amplitudes /= nrm;
  }

  static StateVector computational_basis(int n, std::uint64_t index) {
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t(1) << n);
    amps(static_cast<std::int64_t>(index)) = 1.0;
    return StateVector(n, std::move(amps));
  }
};

// Single-site rotation to the measurement basis of observable p: V maps each
// eigenvector of p to a computational-basis vector, with outcome bit 0
// corresponding to eigenvalue +1 and bit 1 to eigenvalue -1.
inline Eigen::Matrix2cd rotation_matrix(Pauli p) {
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd v;
  switch (p) {
    case Pauli::Z:
      v << 1, 0, 0, 1;
      return v;
    case Pauli::X:
      v << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
      return v;
    case Pauli::Y:
      v << inv_sqrt2, -i * inv_sqrt2, inv_sqrt2, i * inv_sqrt2;
      return v;
  }
  throw std::logic_error("rotation_matrix: bad label");
}

// In-place application of a 2x2 matrix to one qubit of a dense vector.
// Site 0 is the leftmost qubit (most significant bit).
inline void apply_single_qubit(Eigen::VectorXcd& amps, int n, int site, const Eigen::Matrix2cd& m) {
  const std::int64_t stride = std::int64_t(1) << (n - 1 - site);
  const std::int64_t dim = std::int64_t(1) << n;
  for (std::int64_t base = 0; base < dim; base += 2 * stride) {
    for (std::int64_t off = 0; off < stride; ++off) {
      const std::int64_t i0 = base + off;
      const std::int64_t i1 = i0 + stride;
      const Complex a = amps(i0);
      const Complex b = amps(i1);
      amps(i0) = m(0, 0) * a + m(0, 1) * b;
      amps(i1) = m(1, 0) * a + m(1, 1) * b;
    }
  }
}

// (V_1 x ... x V_N) |state>, one 2x2 factor per qubit; the full 2^N x 2^N
// matrix is never materialized.
inline StateVector apply_local_rotation(const StateVector& state, const PauliString& basis) {
  if (static_cast<int>(basis.size()) != state.qubit_count)
    throw std::invalid_argument("apply_local_rotation: basis length != qubit count");
  StateVector out = state;
  for (int site = 0; site < state.qubit_count; ++site) {
    if (basis[site] == Pauli::Z) continue;  // identity factor
    apply_single_qubit(out.amplitudes, state.qubit_count, site, rotation_matrix(basis[site]));
  }
  return out;
}

// <j| U_p |state>: the amplitude of the rotated state at the outcome index.
inline Complex overlap(std::uint64_t outcome, const PauliString& basis, const StateVector& state) {
  StateVector rotated = apply_local_rotation(state, basis);
  if (outcome >= static_cast<std::uint64_t>(rotated.dim()))
    throw std::invalid_argument("overlap: outcome index out of range");
  return rotated.amplitudes(static_cast<std::int64_t>(outcome));
}

// |<a|b>|^2 for normalized states; invariant under global phases.
inline double fidelity(const StateVector& a, const StateVector& b) {
  if (a.qubit_count != b.qubit_count) throw std::invalid_argument("fidelity: qubit counts differ");
  if (!a.is_normalized(1e-8) || !b.is_normalized(1e-8))
    throw std::invalid_argument("fidelity: inputs must be normalized");
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

}  // namespace vqst
