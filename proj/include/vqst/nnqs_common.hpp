#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vqst/core.hpp"
#include "vqst/measurement.hpp"

namespace vqst {

struct SupportLoss {
  double loss = 0.0;
  // d(s) packs (d loss / d Re psi(s)) + i (d loss / d Im psi(s)).
  Eigen::VectorXcd dpsi;
};

namespace detail {

inline void sweep_factors(Eigen::VectorXcd& dense, int n, const PauliString& basis, bool transpose) {
  for (int site = 0; site < n; ++site) {
    if (basis[site] == Pauli::Z) continue;
    Eigen::Matrix2cd v = rotation_matrix(basis[site]);
    if (transpose) v.transposeInPlace();
    apply_single_qubit(dense, n, site, v);
  }
}

}  // namespace detail

// <j|U_p|psi> for every outcome j at once, for a wavefunction known on a
// restricted support S: psi is scattered over the computational basis and the
// per-site factors are swept through. Entry j of the result is the
// sample-restricted sum  sum_{s in S} psi(s) prod_i <j_i|V_i|s_i>.
inline Eigen::VectorXcd support_rotated_amplitudes(const std::vector<std::uint64_t>& support,
                                                   const Eigen::VectorXcd& psi, int n,
                                                   const PauliString& basis) {
  if (static_cast<Eigen::Index>(support.size()) != psi.size())
    throw std::invalid_argument("support_rotated_amplitudes: support/psi size mismatch");
  if (n > 24) throw std::invalid_argument("support_rotated_amplitudes: N too large");
  Eigen::VectorXcd dense = Eigen::VectorXcd::Zero(std::int64_t(1) << n);
  for (Eigen::Index k = 0; k < psi.size(); ++k) dense(static_cast<std::int64_t>(support[k])) = psi(k);
  detail::sweep_factors(dense, n, basis, /*transpose=*/false);
  return dense;
}

// Working support for a loss evaluation: the sampled support joined with the
// view's own record configurations. Z-heavy bases give exactly zero rotated
// amplitude to any record whose configuration the sample set missed, so the
// records must be part of the support for Eq.-(3)-style losses to stay
// finite; their weight under the support normalization is the model's own.
inline std::vector<std::uint64_t> support_with_records(const std::vector<std::uint64_t>& support,
                                                       const DatasetSlice& view) {
  std::vector<std::uint64_t> merged = support;
  for (const auto& span : view.records) merged.insert(merged.end(), span.begin(), span.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return merged;
}

// Negative log-likelihood of the support-restricted state over a dataset
// view, with the adjoint sweep supplying the gradient seed d(s). With
// renormalize set, psi is normalized over S before use (the loss gains
// R*ln sum_S |psi|^2).
inline SupportLoss support_restricted_loss(const std::vector<std::uint64_t>& support,
                                           const Eigen::VectorXcd& psi, int n, const DatasetSlice& view,
                                           bool renormalize, bool want_gradient) {
  if (support.empty()) throw std::invalid_argument("support_restricted_loss: empty support set");
  if (static_cast<Eigen::Index>(support.size()) != psi.size())
    throw std::invalid_argument("support_restricted_loss: support/psi size mismatch");
  if (view.qubit_count != n) throw std::invalid_argument("support_restricted_loss: qubit count mismatch");
  if (n > 24) throw std::invalid_argument("support_restricted_loss: N too large for dense working vectors");

  const std::int64_t dim = std::int64_t(1) << n;
  const std::int64_t record_count = view.total_records();
  if (record_count == 0) throw std::invalid_argument("support_restricted_loss: empty dataset view");

  double z = 1.0;
  if (renormalize) {
    z = psi.squaredNorm();
    if (!(z > 0.0)) throw std::runtime_error("support_restricted_loss: zero weight on support");
  }

  SupportLoss result;
  Eigen::VectorXcd c;
  if (want_gradient) c = Eigen::VectorXcd::Zero(psi.size());

  Eigen::VectorXcd y(dim);
  for (std::size_t p = 0; p < view.records.size(); ++p) {
    if (view.records[p].empty()) continue;
    const PauliString& basis = (*view.bases)[p];
    const Eigen::VectorXcd dense = support_rotated_amplitudes(support, psi, n, basis);

    if (want_gradient) y.setZero();
    for (std::size_t r = 0; r < view.records[p].size(); ++r) {
      const std::int64_t j = static_cast<std::int64_t>(view.records[p][r]);
      const Complex w = dense(j);
      const double w2 = std::norm(w);
      if (!(w2 > 0.0))
        throw std::runtime_error("support_restricted_loss: record amplitude underflowed to zero (basis " +
                                 std::to_string(p) + ", record " + std::to_string(r) + ")");
      result.loss -= std::log(w2);
      if (want_gradient) y(j) += std::conj(w) / w2;
    }
    if (want_gradient) {
      detail::sweep_factors(y, n, basis, /*transpose=*/true);
      for (Eigen::Index k = 0; k < psi.size(); ++k) c(k) += y(static_cast<std::int64_t>(support[k]));
    }
  }

  if (renormalize) result.loss += static_cast<double>(record_count) * std::log(z);
  if (want_gradient) {
    result.dpsi = -2.0 * c.conjugate();
    if (renormalize) result.dpsi += (2.0 * static_cast<double>(record_count) / z) * psi;
  }
  return result;
}

}  // namespace vqst
