#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vqst/core.hpp"

namespace vqst {

// XY chain in a transverse field: H = sum_{i<j} J_ij (s+_i s-_j + s-_i s+_j)
// + B sum_j sz_j with J_ij = J0 / |i-j|^alpha (hbar = 1, angular frequencies).
struct XYModelParams {
  int qubit_count = 2;
  double coupling_j0 = 2.0 * std::numbers::pi * 10.0;     // rad/s
  double alpha = 1.1;                                     // power-law exponent
  double field_b = 2.0 * std::numbers::pi * 1000.0;       // rad/s

  void validate() const {
    if (qubit_count < 2) throw std::invalid_argument("XYModelParams: qubit_count must be >= 2");
    if (alpha <= 0.0) throw std::invalid_argument("XYModelParams: alpha must be > 0");
    if (coupling_j0 <= 0.0) throw std::invalid_argument("XYModelParams: coupling_j0 must be > 0");
  }
};

inline constexpr int kDefaultDenseCap = 14;

// Convention sz|0> = +|0>, sz|1> = -|1>, s+|1> = |0>; the hopping term swaps
// (s_i, s_j) = (1,0) <-> (0,1) and the field contributes B*(N - 2*popcount)
// on the diagonal. Both pieces are real in this basis and commute.
struct XYHamiltonian {
  XYModelParams params;
  Eigen::SparseMatrix<double> hopping;  // off-diagonal part, 2^N x 2^N
  Eigen::VectorXd field_diag;           // B * (N - 2*popcount) per configuration

  std::int64_t dim() const { return std::int64_t(1) << params.qubit_count; }

  Eigen::VectorXcd apply_hopping(const Eigen::VectorXcd& v) const {
    Eigen::VectorXd re = hopping * v.real();
    Eigen::VectorXd im = hopping * v.imag();
    return re + Complex(0.0, 1.0) * im;
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    return apply_hopping(v) + field_diag.cast<Complex>().cwiseProduct(v);
  }

  // Full matrix (hopping + field), for oracle checks at small N.
  Eigen::SparseMatrix<double> matrix() const {
    Eigen::SparseMatrix<double> m = hopping;
    Eigen::SparseMatrix<double> d(dim(), dim());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(dim());
    for (std::int64_t k = 0; k < dim(); ++k) trip.emplace_back(k, k, field_diag(k));
    d.setFromTriplets(trip.begin(), trip.end());
    return m + d;
  }
};

inline double xy_coupling(const XYModelParams& p, int i, int j) {
  return p.coupling_j0 / std::pow(std::abs(i - j), p.alpha);
}

inline XYHamiltonian build_hamiltonian(const XYModelParams& params, int dense_cap = kDefaultDenseCap) {
  params.validate();
  const int n = params.qubit_count;
  if (n > dense_cap)
    throw std::invalid_argument("build_hamiltonian: N exceeds the dense cap (use sector_restrict)");
  const std::int64_t dim = std::int64_t(1) << n;

  std::vector<Eigen::Triplet<double>> trip;
  for (std::int64_t c = 0; c < dim; ++c) {
    const auto cu = static_cast<std::uint64_t>(c);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (bit_at(cu, n, i) == bit_at(cu, n, j)) continue;
        const std::uint64_t mask = (std::uint64_t(1) << (n - 1 - i)) | (std::uint64_t(1) << (n - 1 - j));
        const std::uint64_t partner = cu ^ mask;
        trip.emplace_back(static_cast<std::int64_t>(partner), c, xy_coupling(params, i, j));
      }
    }
  }
  XYHamiltonian h;
  h.params = params;
  h.hopping.resize(dim, dim);
  h.hopping.setFromTriplets(trip.begin(), trip.end());
  h.field_diag.resize(dim);
  for (std::int64_t c = 0; c < dim; ++c)
    h.field_diag(c) = params.field_b * (n - 2 * popcount(static_cast<std::uint64_t>(c)));
  return h;
}

// Neel-ordered product state |1,0,1,0,...>.
inline StateVector neel_state(int n) {
  if (n < 1) throw std::invalid_argument("neel_state: N must be >= 1");
  std::uint64_t index = 0;
  for (int site = 0; site < n; ++site)
    if (site % 2 == 0) index |= std::uint64_t(1) << (n - 1 - site);
  return StateVector::computational_basis(n, index);
}

enum class VolumeLawSign {
  BitParity,     // (-1)^(number of 1 bits in s)
  IntegerParity  // (-1)^(integer value of s mod 2)
};

// 2^(-N/4) * sum_s (-1)^s |s s>, supported on the doubled configurations.
inline StateVector volume_law_state(int n, VolumeLawSign sign = VolumeLawSign::BitParity) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("volume_law_state: N must be even and >= 2");
  const int half = n / 2;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t(1) << n);
  const double mag = std::pow(2.0, -0.25 * n);
  for (std::uint64_t s = 0; s < (std::uint64_t(1) << half); ++s) {
    const int par = sign == VolumeLawSign::BitParity ? popcount(s) : static_cast<int>(s & 1u);
    const std::uint64_t doubled = (s << half) | s;
    amps(static_cast<std::int64_t>(doubled)) = (par % 2 == 0 ? mag : -mag);
  }
  return StateVector(n, std::move(amps));
}

// All configurations with the given excitation number, in increasing order
// (Gosper's hack).
inline std::vector<std::uint64_t> sector_basis(int n, int excitations) {
  if (excitations < 0 || excitations > n) throw std::invalid_argument("sector_basis: bad excitation count");
  std::vector<std::uint64_t> basis;
  if (excitations == 0) {
    basis.push_back(0);
    return basis;
  }
  const std::uint64_t limit = std::uint64_t(1) << n;
  std::uint64_t v = (std::uint64_t(1) << excitations) - 1;
  while (v < limit) {
    basis.push_back(v);
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
  return basis;
}

// Restriction of H to a fixed-magnetization subspace. The hopping part is
// applied matrix-free over the sector basis; the field term is the constant
// B*(N - 2k) there.
struct SectorHamiltonian {
  XYModelParams params;
  int excitations = 0;
  std::vector<std::uint64_t> basis;  // sorted configuration indices

  std::int64_t dim() const { return static_cast<std::int64_t>(basis.size()); }

  double field_shift() const { return params.field_b * (params.qubit_count - 2 * excitations); }

  std::int64_t index_of(std::uint64_t config) const {
    auto it = std::lower_bound(basis.begin(), basis.end(), config);
    if (it == basis.end() || *it != config) throw std::logic_error("SectorHamiltonian: configuration not in sector");
    return it - basis.begin();
  }

  Eigen::VectorXcd apply_hopping(const Eigen::VectorXcd& v) const {
    const int n = params.qubit_count;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
    for (std::int64_t row = 0; row < dim(); ++row) {
      const std::uint64_t c = basis[row];
      Complex acc = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (bit_at(c, n, i) == bit_at(c, n, j)) continue;
          const std::uint64_t mask = (std::uint64_t(1) << (n - 1 - i)) | (std::uint64_t(1) << (n - 1 - j));
          acc += xy_coupling(params, i, j) * v(index_of(c ^ mask));
        }
      }
      out(row) = acc;
    }
    return out;
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    return apply_hopping(v) + field_shift() * v;
  }

  StateVector to_full(const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t(1) << params.qubit_count);
    for (std::int64_t k = 0; k < dim(); ++k) amps(static_cast<std::int64_t>(basis[k])) = v(k);
    return StateVector(params.qubit_count, std::move(amps));
  }

  Eigen::VectorXcd project(const StateVector& state) const {
    if (state.qubit_count != params.qubit_count)
      throw std::invalid_argument("SectorHamiltonian::project: qubit counts differ");
    Eigen::VectorXcd v(dim());
    for (std::int64_t k = 0; k < dim(); ++k) v(k) = state.amplitudes(static_cast<std::int64_t>(basis[k]));
    return v;
  }
};

inline SectorHamiltonian sector_restrict(const XYModelParams& params, int excitations) {
  params.validate();
  SectorHamiltonian s;
  s.params = params;
  s.excitations = excitations;
  s.basis = sector_basis(params.qubit_count, excitations);
  return s;
}

inline SectorHamiltonian sector_restrict(const XYHamiltonian& h, int excitations) {
  return sector_restrict(h.params, excitations);
}

namespace detail {

// exp(-i t A) v for a Hermitian operator given by apply(v), via the Lanczos
// approximation with full reorthogonalization and adaptive substeps. The
// local error estimate is Saad's beta * |last Krylov component|.
template <typename ApplyFn>
Eigen::VectorXcd krylov_propagate(ApplyFn&& apply, Eigen::VectorXcd v, double t, double tol,
                                  int max_krylov = 40, int max_substeps = 4096) {
  if (t == 0.0) return v;
  const std::int64_t dim = v.size();
  const int m_max = static_cast<int>(std::min<std::int64_t>(max_krylov, dim));
  const double v_norm = v.norm();
  if (v_norm == 0.0) return v;

  double remaining = t;
  double step = t;
  int substeps = 0;
  while (remaining > 0.0) {
    if (++substeps > max_substeps)
      throw std::runtime_error("evolve: tolerance not reached within iteration budget");
    const double tau = std::min(step, remaining);

    const double beta0 = v.norm();
    std::vector<Eigen::VectorXcd> basis;
    basis.push_back(v / beta0);
    Eigen::VectorXd alpha(m_max), beta(m_max);
    int m = 0;
    bool breakdown = false;
    for (; m < m_max; ++m) {
      Eigen::VectorXcd w = apply(basis[m]);
      alpha(m) = w.dot(basis[m]).real();
      w -= alpha(m) * basis[m];
      if (m > 0) w -= beta(m - 1) * basis[m - 1];
      for (const auto& b : basis) w -= b.dot(w) * b;  // reorthogonalize
      beta(m) = w.norm();
      if (beta(m) < 1e-14 * std::max(1.0, std::abs(alpha(m)))) {
        breakdown = true;
        ++m;
        break;
      }
      if (m + 1 < m_max) basis.push_back(w / beta(m));
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      tri(k, k) = alpha(k);
      if (k + 1 < m) tri(k, k + 1) = tri(k + 1, k) = beta(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
    Eigen::VectorXcd phases(m);
    for (int k = 0; k < m; ++k) phases(k) = std::exp(Complex(0.0, -tau * eig.eigenvalues()(k)));
    Eigen::VectorXcd small = eig.eigenvectors() *
                             (phases.asDiagonal() * (eig.eigenvectors().row(0).transpose().cast<Complex>()));

    const double err = breakdown ? 0.0 : beta(m - 1) * std::abs(small(m - 1)) * beta0;
    const double budget = tol * std::max(tau / std::abs(t), 1e-3);
    if (err <= budget || breakdown) {
      Eigen::VectorXcd next = Eigen::VectorXcd::Zero(dim);
      for (int k = 0; k < m; ++k) next += (beta0 * small(k)) * basis[k];
      v = std::move(next);
      remaining -= tau;
      if (err < 0.1 * budget) step *= 2.0;
    } else {
      step = tau / 2.0;
      if (step < std::abs(t) * 1e-12)
        throw std::runtime_error("evolve: tolerance not reached within iteration budget");
    }
  }
  return v;
}

}  // namespace detail

// e^{-iHt}|state>. The field term commutes with the hopping term, so it is
// applied exactly as per-configuration phases while the hopping part is
// propagated in a Krylov subspace.
inline StateVector evolve(const StateVector& state, const XYHamiltonian& h, double t, double tol = 1e-9) {
  if (state.qubit_count != h.params.qubit_count) throw std::invalid_argument("evolve: qubit counts differ");
  if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  if (!state.is_normalized(1e-8)) throw std::invalid_argument("evolve: input state must be normalized");
  Eigen::VectorXcd v = detail::krylov_propagate([&h](const Eigen::VectorXcd& x) { return h.apply_hopping(x); },
                                                state.amplitudes, t, tol);
  for (std::int64_t k = 0; k < v.size(); ++k)
    v(k) *= std::exp(Complex(0.0, -t * h.field_diag(k)));
  StateVector out(state.qubit_count, std::move(v));
  out.normalize();
  return out;
}

// Sector-restricted evolution; the field term is the exact global phase
// exp(-i B (N - 2k) t) there.
inline Eigen::VectorXcd evolve_sector(const Eigen::VectorXcd& v, const SectorHamiltonian& h, double t,
                                      double tol = 1e-9) {
  if (v.size() != h.dim()) throw std::invalid_argument("evolve_sector: dimension mismatch");
  if (t < 0.0) throw std::invalid_argument("evolve_sector: t must be >= 0");
  Eigen::VectorXcd out = detail::krylov_propagate([&h](const Eigen::VectorXcd& x) { return h.apply_hopping(x); },
                                                  v, t, tol);
  out *= std::exp(Complex(0.0, -t * h.field_shift()));
  double nrm = out.norm();
  if (nrm > 0.0) out /= nrm;
  return out;
}

}  // namespace vqst
