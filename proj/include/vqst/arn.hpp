#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqst/core.hpp"
#include "vqst/measurement.hpp"
#include "vqst/nnqs_common.hpp"
#include "vqst/rng.hpp"

namespace vqst {

// Masked autoregressive wavefunction
//   Psi(s) = prod_i psi(s_i | s_<i),  psi = sqrt(p_hat(s_i)) exp(2 pi i theta_hat(s_i)),
// with two tanh hidden layers of N clusters x 3 units and an output layer of
// N clusters x (amplitude logit, phase). MADE-style masks keep output
// cluster i blind to inputs >= i, so the state is normalized by construction
// and can be sampled ancestrally. Phase gauge: theta_hat(s_i=0) = 0,
// theta_hat(s_i=1) = theta_i.
class AutoregressiveWavefunction {
 public:
  static constexpr int kClusterSize = 3;

  // The default init scale keeps the state near-uniform, which suits
  // likelihood training. Fidelity training wants a broader init (~0.2) to
  // break the phase-saddle symmetry of the uniform state.
  explicit AutoregressiveWavefunction(int n, std::uint64_t seed, double init_sigma = 0.05)
      : n_(n), sampler_(rng_stream(seed, kSamplerStream)) {
    if (n < 2) throw std::invalid_argument("AutoregressiveWavefunction: N must be >= 2");
    build_masks();
    auto gen = rng_stream(seed, kInitStream);
    std::normal_distribution<double> gauss(0.0, init_sigma);
    auto init = [&](Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
      m.resize(rows, cols);
      for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = gauss(gen);
    };
    const int hidden = kClusterSize * n;
    init(w1_, hidden, n);
    init(w2_, hidden, hidden);
    init(w3_, 2 * n, hidden);
    b1_ = Eigen::VectorXd::Zero(hidden);
    b2_ = Eigen::VectorXd::Zero(hidden);
    b3_ = Eigen::VectorXd::Zero(2 * n);
  }

  int qubit_count() const { return n_; }

  std::int64_t parameter_count() const {
    return w1_.size() + b1_.size() + w2_.size() + b2_.size() + w3_.size() + b3_.size();
  }

  const Eigen::MatrixXd& mask1() const { return mask1_; }
  const Eigen::MatrixXd& mask2() const { return mask2_; }
  const Eigen::MatrixXd& mask3() const { return mask3_; }

  bool renormalize_support() const { return renormalize_support_; }
  void set_renormalize_support(bool v) { renormalize_support_ = v; }

  // Per-site conditional amplitude p0(i) = P(s_i = 0 | s_<i) and raw phase
  // output theta(i) for one configuration.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> forward(std::uint64_t s) const {
    Eigen::MatrixXd x(1, n_);
    for (int c = 0; c < n_; ++c) x(0, c) = bit_at(s, n_, c);
    Eigen::MatrixXd h1, h2, out;
    forward_batch(x, h1, h2, out);
    Eigen::VectorXd p0(n_), theta(n_);
    for (int i = 0; i < n_; ++i) {
      p0(i) = sigmoid_(out(0, i));
      theta(i) = out(0, n_ + i);
    }
    return {std::move(p0), std::move(theta)};
  }

  Complex amplitude(std::uint64_t s) const {
    auto [p0, theta] = forward(s);
    double log_mag = 0.0, arg = 0.0;
    for (int i = 0; i < n_; ++i) {
      const int bit = bit_at(s, n_, i);
      const double p_hat = bit ? 1.0 - p0(i) : p0(i);
      log_mag += 0.5 * std::log(p_hat);
      if (bit) arg += 2.0 * std::numbers::pi * theta(i);
    }
    return std::exp(Complex(log_mag, arg));
  }

  struct Samples {
    std::vector<std::uint64_t> raw;     // acquisition order
    std::vector<std::uint64_t> unique;  // sorted, deduplicated
  };

  // Ancestral sampling: bit i is drawn from p(s_i | s_<i) with the already
  // sampled prefix as network input (later inputs are masked out anyway).
  Samples sample(std::int64_t count) {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(count, n_);
    Eigen::MatrixXd h1, h2, out;
    for (int i = 0; i < n_; ++i) {
      forward_batch(x, h1, h2, out);
      for (Eigen::Index r = 0; r < count; ++r) {
        const double p0 = sigmoid_(out(r, i));
        x(r, i) = uniform_double(sampler_) < p0 ? 0.0 : 1.0;
      }
    }
    Samples s;
    s.raw.reserve(count);
    for (Eigen::Index r = 0; r < count; ++r) {
      std::uint64_t cfg = 0;
      for (int c = 0; c < n_; ++c) cfg = (cfg << 1) | (x(r, c) > 0.5 ? 1u : 0u);
      s.raw.push_back(cfg);
    }
    s.unique = s.raw;
    std::sort(s.unique.begin(), s.unique.end());
    s.unique.erase(std::unique(s.unique.begin(), s.unique.end()), s.unique.end());
    return s;
  }

  void begin_epoch(std::int64_t samples) { support_ = sample(samples).unique; }

  const std::vector<std::uint64_t>& support() const { return support_; }
  void set_support(std::vector<std::uint64_t> s) { support_ = std::move(s); }

  // As for the RBM, losses run on the sampled support joined with the view's
  // record configurations so Z-heavy bases cannot zero out a record that the
  // sample set missed.
  double loss(const DatasetSlice& view) const {
    if (support_.empty()) throw std::invalid_argument("AutoregressiveWavefunction: empty support");
    const std::vector<std::uint64_t> support = support_with_records(support_, view);
    const Eigen::MatrixXd x = support_matrix(support);
    Eigen::MatrixXd h1, h2, out;
    forward_batch(x, h1, h2, out);
    const Eigen::VectorXcd psi = psi_from_outputs(x, out);
    return support_restricted_loss(support, psi, n_, view, renormalize_support_, /*grad=*/false).loss;
  }

  std::pair<double, Eigen::VectorXd> loss_and_gradient(const DatasetSlice& view) const {
    if (support_.empty()) throw std::invalid_argument("AutoregressiveWavefunction: empty support");
    const std::vector<std::uint64_t> support = support_with_records(support_, view);
    const Eigen::MatrixXd x = support_matrix(support);
    Eigen::MatrixXd h1, h2, out;
    forward_batch(x, h1, h2, out);
    const Eigen::VectorXcd psi = psi_from_outputs(x, out);
    const SupportLoss sl = support_restricted_loss(support, psi, n_, view, renormalize_support_, /*grad=*/true);
    Eigen::VectorXd grad = backward_from_dpsi(x, h1, h2, out, psi, sl.dpsi);
    return {sl.loss, std::move(grad)};
  }

  // Diagnostic objective -|<target|Psi>|^2 restricted to the target support.
  std::pair<double, Eigen::VectorXd> fidelity_objective(const StateVector& target) const {
    if (target.qubit_count != n_) throw std::invalid_argument("fidelity_objective: qubit counts differ");
    std::vector<std::uint64_t> support;
    for (std::int64_t k = 0; k < target.dim(); ++k)
      if (target.amplitudes(k) != Complex(0.0, 0.0)) support.push_back(static_cast<std::uint64_t>(k));
    if (support.empty()) throw std::invalid_argument("fidelity_objective: target has empty support");

    const Eigen::MatrixXd x = support_matrix(support);
    Eigen::MatrixXd h1, h2, out;
    forward_batch(x, h1, h2, out);
    const Eigen::VectorXcd psi = psi_from_outputs(x, out);
    Complex o = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k)
      o += std::conj(target.amplitudes(static_cast<std::int64_t>(support[k]))) * psi(static_cast<Eigen::Index>(k));
    const double obj = -std::norm(o);
    Eigen::VectorXcd dpsi(psi.size());
    for (std::size_t k = 0; k < support.size(); ++k)
      dpsi(static_cast<Eigen::Index>(k)) = -2.0 * o * target.amplitudes(static_cast<std::int64_t>(support[k]));
    Eigen::VectorXd grad = backward_from_dpsi(x, h1, h2, out, psi, dpsi);
    return {obj, std::move(grad)};
  }

  StateVector to_dense() const {
    if (n_ > 20) throw std::invalid_argument("to_dense: N too large for enumeration");
    std::vector<std::uint64_t> full(std::size_t(1) << n_);
    for (std::size_t k = 0; k < full.size(); ++k) full[k] = k;
    const Eigen::MatrixXd x = support_matrix(full);
    Eigen::MatrixXd h1, h2, out;
    forward_batch(x, h1, h2, out);
    Eigen::VectorXcd amps = psi_from_outputs(x, out);
    StateVector state(n_, std::move(amps));
    state.normalize();  // removes float rounding only; normalized by construction
    return state;
  }

  // Packed order: W1 (column-major), b1, W2, b2, W3, b3. Masked entries are
  // kept in the vector; their gradient is identically zero.
  Eigen::VectorXd parameters() const {
    Eigen::VectorXd p(parameter_count());
    Eigen::Index k = 0;
    k = pack(p, k, w1_);
    k = pack(p, k, b1_);
    k = pack(p, k, w2_);
    k = pack(p, k, b2_);
    k = pack(p, k, w3_);
    k = pack(p, k, b3_);
    return p;
  }

  void set_parameters(const Eigen::VectorXd& p) {
    if (p.size() != parameter_count()) throw std::invalid_argument("set_parameters: size mismatch");
    Eigen::Index k = 0;
    k = unpack(p, k, w1_);
    k = unpack(p, k, b1_);
    k = unpack(p, k, w2_);
    k = unpack(p, k, b2_);
    k = unpack(p, k, w3_);
    k = unpack(p, k, b3_);
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("AutoregressiveWavefunction::save: cannot open " + path);
    out << "VQSTARN1 N=" << n_ << "\n";
    const Eigen::VectorXd p = parameters();
    out.write(reinterpret_cast<const char*>(p.data()), sizeof(double) * p.size());
    std::ostringstream rs;
    rs << sampler_;
    const std::string rng_text = rs.str();
    const std::uint64_t len = rng_text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(rng_text.data(), static_cast<std::streamsize>(len));
    if (!out) throw std::runtime_error("AutoregressiveWavefunction::save: write failed for " + path);
  }

  static AutoregressiveWavefunction load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("AutoregressiveWavefunction::load: cannot open " + path);
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string magic, nf;
    hs >> magic >> nf;
    if (magic != "VQSTARN1") throw std::runtime_error("AutoregressiveWavefunction::load: bad header in " + path);
    AutoregressiveWavefunction a(std::stoi(nf.substr(2)), 0);
    Eigen::VectorXd p(a.parameter_count());
    in.read(reinterpret_cast<char*>(p.data()), sizeof(double) * p.size());
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len > (1u << 20)) throw std::runtime_error("AutoregressiveWavefunction::load: truncated file " + path);
    std::string rng_text(len, '\0');
    in.read(rng_text.data(), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error("AutoregressiveWavefunction::load: truncated file " + path);
    std::istringstream rs(rng_text);
    rs >> a.sampler_;
    a.set_parameters(p);
    return a;
  }

 private:
  static constexpr std::uint64_t kInitStream = 31;
  static constexpr std::uint64_t kSamplerStream = 37;

  static double sigmoid_(double z) { return z > 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

  // Cluster degrees m(c) = min(c, N-1) for 1-based cluster c. A hidden unit
  // of degree d sees inputs 1..d; output cluster i sees hidden units of
  // degree <= i-1, which makes the dependence strictly lower-triangular.
  void build_masks() {
    const int hidden = kClusterSize * n_;
    auto degree = [this](int unit) { return std::min(unit / kClusterSize + 1, n_ - 1); };
    mask1_ = Eigen::MatrixXd::Zero(hidden, n_);
    for (int u = 0; u < hidden; ++u)
      for (int j = 0; j < n_; ++j)
        if (j + 1 <= degree(u)) mask1_(u, j) = 1.0;
    mask2_ = Eigen::MatrixXd::Zero(hidden, hidden);
    for (int u = 0; u < hidden; ++u)
      for (int v = 0; v < hidden; ++v)
        if (degree(v) <= degree(u)) mask2_(u, v) = 1.0;
    mask3_ = Eigen::MatrixXd::Zero(2 * n_, hidden);
    for (int o = 0; o < 2 * n_; ++o) {
      const int cluster = o % n_;  // rows 0..N-1 amplitude, N..2N-1 phase
      for (int v = 0; v < hidden; ++v)
        if (degree(v) <= cluster) mask3_(o, v) = 1.0;
    }
  }

  Eigen::MatrixXd support_matrix(const std::vector<std::uint64_t>& support) const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(support.size()), n_);
    for (std::size_t k = 0; k < support.size(); ++k)
      for (int c = 0; c < n_; ++c) x(static_cast<Eigen::Index>(k), c) = bit_at(support[k], n_, c);
    return x;
  }

  void forward_batch(const Eigen::MatrixXd& x, Eigen::MatrixXd& h1, Eigen::MatrixXd& h2,
                     Eigen::MatrixXd& out) const {
    h1 = ((x * (w1_.cwiseProduct(mask1_)).transpose()).rowwise() + b1_.transpose()).array().tanh().matrix();
    h2 = ((h1 * (w2_.cwiseProduct(mask2_)).transpose()).rowwise() + b2_.transpose()).array().tanh().matrix();
    out = (h2 * (w3_.cwiseProduct(mask3_)).transpose()).rowwise() + b3_.transpose();
  }

  Eigen::VectorXcd psi_from_outputs(const Eigen::MatrixXd& x, const Eigen::MatrixXd& out) const {
    Eigen::VectorXcd psi(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      double log_mag = 0.0, arg = 0.0;
      for (int i = 0; i < n_; ++i) {
        const double p0 = sigmoid_(out(r, i));
        if (x(r, i) > 0.5) {
          log_mag += 0.5 * std::log(std::max(1.0 - p0, 1e-300));
          arg += 2.0 * std::numbers::pi * out(r, n_ + i);
        } else {
          log_mag += 0.5 * std::log(std::max(p0, 1e-300));
        }
      }
      psi(r) = std::exp(Complex(log_mag, arg));
    }
    return psi;
  }

  // Seeds at the output layer:
  //   d loss/d z_amp(i) = 0.5 Re(e) * (s_i==0 ? 1-p0 : -p0)
  //   d loss/d z_phase(i) = -2 pi Im(e) * s_i,   e = conj(dpsi) * psi.
  Eigen::VectorXd backward_from_dpsi(const Eigen::MatrixXd& x, const Eigen::MatrixXd& h1,
                                     const Eigen::MatrixXd& h2, const Eigen::MatrixXd& out,
                                     const Eigen::VectorXcd& psi, const Eigen::VectorXcd& dpsi) const {
    const Eigen::Index rows = x.rows();
    Eigen::MatrixXd dout(rows, 2 * n_);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Complex e = std::conj(dpsi(r)) * psi(r);
      for (int i = 0; i < n_; ++i) {
        const double p0 = sigmoid_(out(r, i));
        const double dlogp = x(r, i) > 0.5 ? -p0 : 1.0 - p0;
        dout(r, i) = 0.5 * e.real() * dlogp;
        dout(r, n_ + i) = -2.0 * std::numbers::pi * e.imag() * (x(r, i) > 0.5 ? 1.0 : 0.0);
      }
    }

    Eigen::MatrixXd gw3 = (dout.transpose() * h2).cwiseProduct(mask3_);
    Eigen::VectorXd gb3 = dout.colwise().sum().transpose();
    Eigen::MatrixXd dh2 = dout * w3_.cwiseProduct(mask3_);
    dh2.array() *= (1.0 - h2.array().square());
    Eigen::MatrixXd gw2 = (dh2.transpose() * h1).cwiseProduct(mask2_);
    Eigen::VectorXd gb2 = dh2.colwise().sum().transpose();
    Eigen::MatrixXd dh1 = dh2 * w2_.cwiseProduct(mask2_);
    dh1.array() *= (1.0 - h1.array().square());
    Eigen::MatrixXd gw1 = (dh1.transpose() * x).cwiseProduct(mask1_);
    Eigen::VectorXd gb1 = dh1.colwise().sum().transpose();

    Eigen::VectorXd grad(parameter_count());
    Eigen::Index k = 0;
    k = pack(grad, k, gw1);
    k = pack(grad, k, gb1);
    k = pack(grad, k, gw2);
    k = pack(grad, k, gb2);
    k = pack(grad, k, gw3);
    k = pack(grad, k, gb3);
    return grad;
  }

  static Eigen::Index pack(Eigen::VectorXd& p, Eigen::Index k, const Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) p(k++) = m(r, c);
    return k;
  }
  static Eigen::Index unpack(const Eigen::VectorXd& p, Eigen::Index k, Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = p(k++);
    return k;
  }
  static Eigen::Index pack(Eigen::VectorXd& p, Eigen::Index k, const Eigen::VectorXd& v) {
    for (Eigen::Index r = 0; r < v.size(); ++r) p(k++) = v(r);
    return k;
  }
  static Eigen::Index unpack(const Eigen::VectorXd& p, Eigen::Index k, Eigen::VectorXd& v) {
    for (Eigen::Index r = 0; r < v.size(); ++r) v(r) = p(k++);
    return k;
  }

  int n_;
  Eigen::MatrixXd w1_, w2_, w3_;
  Eigen::VectorXd b1_, b2_, b3_;
  Eigen::MatrixXd mask1_, mask2_, mask3_;
  std::mt19937_64 sampler_;
  std::vector<std::uint64_t> support_;
  bool renormalize_support_ = true;
};

}  // namespace vqst
