#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vqst/core.hpp"
#include "vqst/measurement.hpp"

namespace vqst {

// Negative log-likelihood of a dense normalized state on a dataset view,
// computed by rotating once per basis.
inline double dense_loss(const StateVector& state, const DatasetSlice& view) {
  if (view.qubit_count != state.qubit_count) throw std::invalid_argument("dense_loss: qubit counts differ");
  double loss = 0.0;
  for (std::size_t p = 0; p < view.records.size(); ++p) {
    if (view.records[p].empty()) continue;
    const StateVector rotated = apply_local_rotation(state, (*view.bases)[p]);
    for (std::uint64_t j : view.records[p]) {
      const double prob = std::norm(rotated.amplitudes(static_cast<std::int64_t>(j)));
      if (!(prob > 0.0)) return std::numeric_limits<double>::infinity();
      loss -= std::log(prob);
    }
  }
  return loss;
}

// (test loss of the theory state) - (test loss of the reconstruction);
// positive values mean the reconstruction is more consistent with the data.
inline double loss_difference(const StateVector& theory, const StateVector& reconstruction,
                              const DatasetSlice& test_view) {
  if (theory.qubit_count != reconstruction.qubit_count)
    throw std::invalid_argument("loss_difference: qubit counts differ");
  return dense_loss(theory, test_view) - dense_loss(reconstruction, test_view);
}

using SitePauli = std::pair<int, Pauli>;

// <state| O |state> for a product of one or two single-site Paulis, via the
// rotation trick: rotate the involved sites, then sum eigenvalue products
// (+1 for bit 0, -1 for bit 1) against |amplitude|^2.
inline double expectation_from_state(const StateVector& state, std::span<const SitePauli> sites) {
  if (sites.empty() || sites.size() > 2) throw std::invalid_argument("expectation_from_state: need 1 or 2 sites");
  if (!state.is_normalized(1e-8)) throw std::invalid_argument("expectation_from_state: state must be normalized");
  const int n = state.qubit_count;
  for (const auto& [site, p] : sites)
    if (site < 0 || site >= n) throw std::invalid_argument("expectation_from_state: site out of range");

  Eigen::VectorXcd amps = state.amplitudes;
  for (const auto& [site, p] : sites)
    if (p != Pauli::Z) apply_single_qubit(amps, n, site, rotation_matrix(p));

  double total = 0.0;
  for (std::int64_t k = 0; k < amps.size(); ++k) {
    int sign = 1;
    for (const auto& [site, p] : sites)
      if (bit_at(static_cast<std::uint64_t>(k), n, site)) sign = -sign;
    total += sign * std::norm(amps(k));
  }
  return total;
}

struct DataEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t shots = 0;
};

// Empirical mean of the +-1 eigenvalue products over every basis whose labels
// match the requested Paulis at the requested sites (pooled across bases),
// with the binomial standard error.
inline DataEstimate expectation_from_data(const MeasurementDataset& data, std::span<const SitePauli> sites) {
  if (sites.empty() || sites.size() > 2) throw std::invalid_argument("expectation_from_data: need 1 or 2 sites");
  const int n = data.qubit_count;
  for (const auto& [site, p] : sites)
    if (site < 0 || site >= n) throw std::invalid_argument("expectation_from_data: site out of range");

  std::int64_t shots = 0;
  double sum = 0.0;
  for (std::size_t p = 0; p < data.bases.size(); ++p) {
    bool match = true;
    for (const auto& [site, pauli] : sites)
      if (data.bases[p][site] != pauli) match = false;
    if (!match) continue;
    for (std::uint64_t j : data.outcomes[p]) {
      int sign = 1;
      for (const auto& [site, pauli] : sites)
        if (bit_at(j, n, site)) sign = -sign;
      sum += sign;
      ++shots;
    }
  }
  if (shots == 0) {
    std::string where;
    for (const auto& [site, pauli] : sites)
      where += std::string(1, pauli_char(pauli)) + "@" + std::to_string(site) + " ";
    throw std::invalid_argument("expectation_from_data: no basis measures " + where);
  }
  DataEstimate est;
  est.shots = shots;
  est.value = sum / static_cast<double>(shots);
  est.std_error = std::sqrt(std::max(0.0, 1.0 - est.value * est.value) / static_cast<double>(shots));
  return est;
}

// Single-site expectations plus raw and connected pairwise correlations for
// one Pauli label, from a state or directly from data.
struct CorrelationReport {
  std::string source;  // "theory" | "reconstruction" | "direct-data"
  Pauli pauli = Pauli::Y;
  Eigen::VectorXd single_site;     // N
  Eigen::MatrixXd pair_raw;        // N x N, symmetric
  Eigen::MatrixXd pair_connected;  // raw - <P_i><P_j>
};

inline CorrelationReport correlation_report_from_state(const StateVector& state, Pauli pauli,
                                                       const std::string& source) {
  const int n = state.qubit_count;
  CorrelationReport rep;
  rep.source = source;
  rep.pauli = pauli;
  rep.single_site.resize(n);
  rep.pair_raw.resize(n, n);
  rep.pair_connected.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const SitePauli one[1] = {{i, pauli}};
    rep.single_site(i) = expectation_from_state(state, one);
  }
  for (int i = 0; i < n; ++i) {
    rep.pair_raw(i, i) = 1.0;  // P^2 = I
    for (int j = i + 1; j < n; ++j) {
      const SitePauli two[2] = {{i, pauli}, {j, pauli}};
      rep.pair_raw(i, j) = rep.pair_raw(j, i) = expectation_from_state(state, two);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      rep.pair_connected(i, j) = rep.pair_raw(i, j) - rep.single_site(i) * rep.single_site(j);
  return rep;
}

inline CorrelationReport correlation_report_from_data(const MeasurementDataset& data, Pauli pauli) {
  const int n = data.qubit_count;
  CorrelationReport rep;
  rep.source = "direct-data";
  rep.pauli = pauli;
  rep.single_site = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  rep.pair_raw = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  rep.pair_connected = rep.pair_raw;
  for (int i = 0; i < n; ++i) {
    const SitePauli one[1] = {{i, pauli}};
    try {
      rep.single_site(i) = expectation_from_data(data, one).value;
    } catch (const std::invalid_argument&) {
    }
  }
  for (int i = 0; i < n; ++i) {
    rep.pair_raw(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const SitePauli two[2] = {{i, pauli}, {j, pauli}};
      try {
        rep.pair_raw(i, j) = rep.pair_raw(j, i) = expectation_from_data(data, two).value;
      } catch (const std::invalid_argument&) {
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      rep.pair_connected(i, j) = rep.pair_raw(i, j) - rep.single_site(i) * rep.single_site(j);
  return rep;
}

inline void write_vector_csv(const std::string& path, const Eigen::VectorXd& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vector_csv: cannot open " + path);
  out.precision(12);
  for (Eigen::Index k = 0; k < v.size(); ++k) out << v(k) << "\n";
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  out.precision(12);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << m(r, c) << (c + 1 < m.cols() ? "," : "");
    out << "\n";
  }
}

}  // namespace vqst
