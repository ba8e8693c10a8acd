#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqst/core.hpp"
#include "vqst/measurement.hpp"
#include "vqst/rng.hpp"

namespace vqst {

// Matrix product state |Psi> = sum_s [A^1_{s_1} ... A^N_{s_N}] |s>, with the
// capped bond schedule chi_i = min(2^i, 2^(N-i), chi_max). Training is plain
// gradient descent on fixed shapes; no canonical form or SVD truncation.
class MatrixProductState {
 public:
  MatrixProductState(int n, int chi_max) : n_(n), chi_max_(chi_max) {
    if (n < 2) throw std::invalid_argument("MatrixProductState: N must be >= 2");
    if (chi_max < 1) throw std::invalid_argument("MatrixProductState: chi_max must be >= 1");
    const auto bonds = bond_schedule(n, chi_max);
    sites_.resize(n);
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < 2; ++b) sites_[i][b] = Eigen::MatrixXcd::Zero(bonds[i], bonds[i + 1]);
  }

  static std::vector<int> bond_schedule(int n, int chi_max) {
    std::vector<int> bonds(n + 1, 1);
    for (int i = 1; i < n; ++i) {
      const double left = std::pow(2.0, std::min(i, 62));
      const double right = std::pow(2.0, std::min(n - i, 62));
      bonds[i] = static_cast<int>(std::min({left, right, static_cast<double>(chi_max)}));
    }
    return bonds;
  }

  // Entries i.i.d. complex Gaussian with component scale 1/sqrt(chi_max).
  static MatrixProductState random(int n, int chi_max, std::uint64_t seed) {
    MatrixProductState m(n, chi_max);
    auto gen = rng_stream(seed, kInitStream);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(chi_max)));
    for (auto& site : m.sites_)
      for (auto& mat : site)
        for (Eigen::Index c = 0; c < mat.cols(); ++c)
          for (Eigen::Index r = 0; r < mat.rows(); ++r) mat(r, c) = Complex(gauss(gen), gauss(gen));
    return m;
  }

  int qubit_count() const { return n_; }
  int chi_max() const { return chi_max_; }
  const Eigen::MatrixXcd& matrix(int site, int bit) const { return sites_[site][bit]; }
  Eigen::MatrixXcd& matrix(int site, int bit) { return sites_[site][bit]; }

  // Number of complex matrix entries, Sum_i 2*chi_{i-1}*chi_i.
  std::int64_t complex_parameter_count() const {
    std::int64_t count = 0;
    for (const auto& site : sites_) count += 2 * site[0].size();
    return count;
  }

  std::int64_t real_parameter_count() const { return 2 * complex_parameter_count(); }

  Complex amplitude(std::uint64_t config) const {
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Ones(1);
    for (int i = 0; i < n_; ++i) row = row * sites_[i][bit_at(config, n_, i)];
    return row(0);
  }

  // Site-wise basis change (A^i_b)' = sum_b' V^i[b][b'] A^i_b'.
  MatrixProductState rotated(const PauliString& basis) const {
    if (static_cast<int>(basis.size()) != n_) throw std::invalid_argument("rotated: basis length != N");
    MatrixProductState out = *this;
    for (int i = 0; i < n_; ++i) {
      if (basis[i] == Pauli::Z) continue;
      const Eigen::Matrix2cd v = rotation_matrix(basis[i]);
      out.sites_[i][0] = v(0, 0) * sites_[i][0] + v(0, 1) * sites_[i][1];
      out.sites_[i][1] = v(1, 0) * sites_[i][0] + v(1, 1) * sites_[i][1];
    }
    return out;
  }

  // <Psi|Psi> by the transfer-matrix contraction, O(N chi^3).
  double norm_squared() const {
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
    for (int i = 0; i < n_; ++i) {
      Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(sites_[i][0].cols(), sites_[i][0].cols());
      for (int b = 0; b < 2; ++b) next += sites_[i][b].adjoint() * env * sites_[i][b];
      env = std::move(next);
    }
    return env(0, 0).real();
  }

  StateVector to_dense() const {
    std::vector<Eigen::RowVectorXcd> rows{Eigen::RowVectorXcd::Ones(1)};
    for (int i = 0; i < n_; ++i) {
      std::vector<Eigen::RowVectorXcd> next(rows.size() * 2);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (int b = 0; b < 2; ++b) next[r * 2 + b] = rows[r] * sites_[i][b];
      rows = std::move(next);
    }
    Eigen::VectorXcd amps(static_cast<std::int64_t>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) amps(static_cast<std::int64_t>(k)) = rows[k](0);
    StateVector state(n_, std::move(amps));
    state.normalize();
    return state;
  }

  // Real parameter vector: sites in order, bit 0 then 1, column-major
  // entries, (re, im) interleaved.
  Eigen::VectorXd parameters() const {
    Eigen::VectorXd p(real_parameter_count());
    Eigen::Index k = 0;
    for (const auto& site : sites_)
      for (const auto& mat : site)
        for (Eigen::Index c = 0; c < mat.cols(); ++c)
          for (Eigen::Index r = 0; r < mat.rows(); ++r) {
            p(k++) = mat(r, c).real();
            p(k++) = mat(r, c).imag();
          }
    return p;
  }

  void set_parameters(const Eigen::VectorXd& p) {
    if (p.size() != real_parameter_count()) throw std::invalid_argument("set_parameters: size mismatch");
    Eigen::Index k = 0;
    for (auto& site : sites_)
      for (auto& mat : site)
        for (Eigen::Index c = 0; c < mat.cols(); ++c)
          for (Eigen::Index r = 0; r < mat.rows(); ++r) {
            mat(r, c) = Complex(p(k), p(k + 1));
            k += 2;
          }
  }

  // Negative log-likelihood with a per-record ln<Psi|Psi> normalization term:
  // loss = -sum_rec [ ln|<j|U_p|Psi>|^2 - ln<Psi|Psi> ].
  double loss(const DatasetSlice& view) const { return loss_impl(view, nullptr); }

  std::pair<double, Eigen::VectorXd> loss_and_gradient(const DatasetSlice& view) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(real_parameter_count());
    const double value = loss_impl(view, &grad);
    return {value, std::move(grad)};
  }

  // Trainer hooks (sampling-free ansatz).
  void begin_epoch(std::int64_t /*samples*/) {}

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("MatrixProductState::save: cannot open " + path);
    out << "VQSTMPS1 N=" << n_ << " CHI=" << chi_max_ << "\n";
    for (const auto& site : sites_)
      for (const auto& mat : site) {
        const std::uint32_t rows = static_cast<std::uint32_t>(mat.rows());
        const std::uint32_t cols = static_cast<std::uint32_t>(mat.cols());
        out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
        out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
        out.write(reinterpret_cast<const char*>(mat.data()), sizeof(Complex) * mat.size());
      }
    if (!out) throw std::runtime_error("MatrixProductState::save: write failed for " + path);
  }

  static MatrixProductState load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("MatrixProductState::load: cannot open " + path);
    std::string header;
    std::getline(in, header);
    int n = 0, chi = 0;
    std::istringstream hs(header);
    std::string magic, nf, cf;
    hs >> magic >> nf >> cf;
    if (magic != "VQSTMPS1" || nf.rfind("N=", 0) != 0 || cf.rfind("CHI=", 0) != 0)
      throw std::runtime_error("MatrixProductState::load: bad header in " + path);
    n = std::stoi(nf.substr(2));
    chi = std::stoi(cf.substr(4));
    MatrixProductState m(n, chi);
    for (auto& site : m.sites_)
      for (auto& mat : site) {
        std::uint32_t rows = 0, cols = 0;
        in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
        in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
        if (!in || rows != static_cast<std::uint32_t>(mat.rows()) || cols != static_cast<std::uint32_t>(mat.cols()))
          throw std::runtime_error("MatrixProductState::load: shape mismatch in " + path);
        in.read(reinterpret_cast<char*>(mat.data()), sizeof(Complex) * mat.size());
        if (!in) throw std::runtime_error("MatrixProductState::load: truncated file " + path);
      }
    return m;
  }

 private:
  static constexpr std::uint64_t kInitStream = 17;

  double loss_impl(const DatasetSlice& view, Eigen::VectorXd* grad) const {
    if (view.qubit_count != n_) throw std::invalid_argument("loss: dataset qubit count != N");
    const std::int64_t record_count = view.total_records();
    if (record_count == 0) throw std::invalid_argument("loss: empty dataset view");

    // Parameter offsets per (site, bit) into the packed real vector.
    std::vector<std::array<Eigen::Index, 2>> offset(n_);
    {
      Eigen::Index k = 0;
      for (int i = 0; i < n_; ++i)
        for (int b = 0; b < 2; ++b) {
          offset[i][b] = k;
          k += 2 * sites_[i][b].size();
        }
    }

    // Left/right environments for <Psi|Psi> and its gradient.
    std::vector<Eigen::MatrixXcd> left(n_ + 1), right(n_ + 1);
    left[0] = Eigen::MatrixXcd::Ones(1, 1);
    for (int i = 0; i < n_; ++i) {
      Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(sites_[i][0].cols(), sites_[i][0].cols());
      for (int b = 0; b < 2; ++b) next += sites_[i][b].adjoint() * left[i] * sites_[i][b];
      left[i + 1] = std::move(next);
    }
    right[n_] = Eigen::MatrixXcd::Ones(1, 1);
    for (int i = n_ - 1; i >= 0; --i) {
      Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(sites_[i][0].rows(), sites_[i][0].rows());
      for (int b = 0; b < 2; ++b) next += sites_[i][b] * right[i + 1] * sites_[i][b].adjoint();
      right[i] = std::move(next);
    }
    const double nrm2 = left[n_](0, 0).real();
    if (!(nrm2 > 0.0)) throw std::runtime_error("loss: MPS has zero norm");

    double loss = static_cast<double>(record_count) * std::log(nrm2);
    if (grad) {
      const double scale = 2.0 * static_cast<double>(record_count) / nrm2;
      for (int i = 0; i < n_; ++i)
        for (int b = 0; b < 2; ++b) {
          const Eigen::MatrixXcd m = left[i] * sites_[i][b] * right[i + 1];
          add_matrix_gradient(*grad, offset[i][b], m, scale);
        }
    }

    std::vector<Eigen::RowVectorXcd> prefix(n_ + 1);
    std::vector<Eigen::VectorXcd> suffix(n_ + 1);
    for (std::size_t p = 0; p < view.records.size(); ++p) {
      if (view.records[p].empty()) continue;
      const PauliString& basis = (*view.bases)[p];
      const MatrixProductState rot = rotated(basis);
      std::vector<Eigen::Matrix2cd> vmats(n_);
      for (int i = 0; i < n_; ++i) vmats[i] = rotation_matrix(basis[i]);

      for (std::size_t r = 0; r < view.records[p].size(); ++r) {
        const std::uint64_t j = view.records[p][r];
        prefix[0] = Eigen::RowVectorXcd::Ones(1);
        for (int i = 0; i < n_; ++i) prefix[i + 1] = prefix[i] * rot.sites_[i][bit_at(j, n_, i)];
        const Complex amp = prefix[n_](0);
        const double p2 = std::norm(amp);
        if (!(p2 > 0.0))
          throw std::runtime_error("loss: zero record amplitude (basis " + std::to_string(p) +
                                   ", record " + std::to_string(r) + ")");
        loss -= std::log(p2);
        if (!grad) continue;

        suffix[n_] = Eigen::VectorXcd::Ones(1);
        for (int i = n_ - 1; i >= 0; --i) suffix[i] = rot.sites_[i][bit_at(j, n_, i)] * suffix[i + 1];
        // d(-ln|amp|^2)/d(re x, im x) = (-2 Re(c g), +2 Im(c g)) = -2 (Re, Im) of conj(c g)
        const Complex c = std::conj(amp) / p2;
        for (int i = 0; i < n_; ++i) {
          const int jb = bit_at(j, n_, i);
          const Eigen::MatrixXcd outer = (prefix[i].transpose() * suffix[i + 1].transpose()).conjugate();
          for (int b = 0; b < 2; ++b) {
            const Complex coeff = vmats[i](jb, b);
            if (coeff == Complex(0.0, 0.0)) continue;
            add_matrix_gradient(*grad, offset[i][b], (std::conj(c * coeff)) * outer, -2.0);
          }
        }
      }
    }
    return loss;
  }

  // grad[offset..] += scale * (Re m, Im m) over column-major entries.
  static void add_matrix_gradient(Eigen::VectorXd& grad, Eigen::Index offset, const Eigen::MatrixXcd& m,
                                  double scale) {
    Eigen::Index k = offset;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        grad(k++) += scale * m(r, c).real();
        grad(k++) += scale * m(r, c).imag();
      }
  }

  int n_;
  int chi_max_;
  std::vector<std::array<Eigen::MatrixXcd, 2>> sites_;
};

}  // namespace vqst
