#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
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

inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
inline double sigmoid(double x) { return x > 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// Paired restricted Boltzmann machines: one set (lambda) encodes amplitudes,
// an identically shaped set (mu) encodes phases,
//   psi(s) = exp(log_p(s)/2) * exp(i phase(s)),
// with the hidden layer summed out in closed form. Sampling is one-step
// persistent contrastive divergence over L parallel chains; the likelihood is
// evaluated on the unique chain states, renormalized over that support.
class RbmWavefunction {
 public:
  RbmWavefunction(int n, int hidden, int chains, std::uint64_t seed, double init_sigma = 0.01)
      : n_(n), h_(hidden), sampler_(rng_stream(seed, kSamplerStream)) {
    if (n < 1 || hidden < 1 || chains < 1) throw std::invalid_argument("RbmWavefunction: bad shape");
    auto gen = rng_stream(seed, kInitStream);
    std::normal_distribution<double> gauss(0.0, init_sigma);
    auto init = [&](Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
      m.resize(rows, cols);
      for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = gauss(gen);
    };
    init(w_amp_, n, hidden);
    init(w_ph_, n, hidden);
    a_amp_ = Eigen::VectorXd::Zero(n);
    b_amp_ = Eigen::VectorXd::Zero(hidden);
    a_ph_ = Eigen::VectorXd::Zero(n);
    b_ph_ = Eigen::VectorXd::Zero(hidden);
    chains_.resize(chains, n);
    for (Eigen::Index r = 0; r < chains_.rows(); ++r)
      for (Eigen::Index c = 0; c < chains_.cols(); ++c) chains_(r, c) = (sampler_() & 1u) ? 1.0 : 0.0;
  }

  int qubit_count() const { return n_; }
  int hidden_count() const { return h_; }
  int chain_count() const { return static_cast<int>(chains_.rows()); }

  std::int64_t parameter_count() const { return 2 * (std::int64_t(n_) * h_ + n_ + h_); }

  // log of the hidden-summed unnormalized marginal of the amplitude set:
  // a.s + sum_i log(1 + exp((sW + b)_i)).
  double log_unnormalized_p(std::uint64_t s) const { return set_value(s, w_amp_, a_amp_, b_amp_); }

  // Same closed form on the mu set, used directly as the phase angle.
  double phase(std::uint64_t s) const { return set_value(s, w_ph_, a_ph_, b_ph_); }

  Complex amplitude(std::uint64_t s) const {
    return std::exp(Complex(0.5 * log_unnormalized_p(s), phase(s)));
  }

  // One persistent CD sweep: h ~ P(h_i=1|s) = sigma((sW+b)_i), then
  // s' ~ P(s_j=1|h) = sigma((Wh+a)_j); the chains are replaced by s'.
  void cd_step() {
    Eigen::MatrixXd act_h = (chains_ * w_amp_).rowwise() + b_amp_.transpose();
    Eigen::MatrixXd hidden(chains_.rows(), h_);
    for (Eigen::Index r = 0; r < hidden.rows(); ++r)
      for (Eigen::Index c = 0; c < hidden.cols(); ++c)
        hidden(r, c) = uniform_double(sampler_) < sigmoid(act_h(r, c)) ? 1.0 : 0.0;
    Eigen::MatrixXd act_v = (hidden * w_amp_.transpose()).rowwise() + a_amp_.transpose();
    for (Eigen::Index r = 0; r < chains_.rows(); ++r)
      for (Eigen::Index c = 0; c < chains_.cols(); ++c)
        chains_(r, c) = uniform_double(sampler_) < sigmoid(act_v(r, c)) ? 1.0 : 0.0;
  }

  std::uint64_t chain_config(int chain) const {
    std::uint64_t s = 0;
    for (int c = 0; c < n_; ++c) s = (s << 1) | (chains_(chain, c) > 0.5 ? 1u : 0u);
    return s;
  }

  // ceil(total/L) CD sweeps, accumulating the chain states after each; the
  // deduplicated set becomes the working support for this epoch.
  std::vector<std::uint64_t> sample_support(std::int64_t total_samples) {
    const std::int64_t l = chains_.rows();
    const std::int64_t steps = std::max<std::int64_t>(1, (total_samples + l - 1) / l);
    std::vector<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(steps * l));
    for (std::int64_t k = 0; k < steps; ++k) {
      cd_step();
      for (int r = 0; r < chain_count(); ++r) seen.push_back(chain_config(r));
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    return seen;
  }

  void begin_epoch(std::int64_t samples) { support_ = sample_support(samples); }

  const std::vector<std::uint64_t>& support() const { return support_; }
  void set_support(std::vector<std::uint64_t> s) { support_ = std::move(s); }

  // Losses are evaluated on the sampled support joined with the view's own
  // record configurations (see support_with_records): a Z-heavy basis pins a
  // record's rotated amplitude to the support, and the working vector must
  // see the record for the likelihood to stay finite.
  double loss(const DatasetSlice& view) const {
    if (support_.empty()) throw std::invalid_argument("RbmWavefunction: empty support (call begin_epoch)");
    const std::vector<std::uint64_t> support = support_with_records(support_, view);
    const Eigen::MatrixXd smat = support_matrix(support);
    Eigen::MatrixXd theta_amp, theta_ph;
    Eigen::VectorXd logp, ph;
    const Eigen::VectorXcd psi = batch_psi(smat, theta_amp, theta_ph, logp, ph);
    return support_restricted_loss(support, psi, n_, view, /*renormalize=*/true, /*grad=*/false).loss;
  }

  std::pair<double, Eigen::VectorXd> loss_and_gradient(const DatasetSlice& view) const {
    if (support_.empty()) throw std::invalid_argument("RbmWavefunction: empty support (call begin_epoch)");
    const std::vector<std::uint64_t> support = support_with_records(support_, view);
    const Eigen::MatrixXd smat = support_matrix(support);
    Eigen::MatrixXd theta_amp, theta_ph;
    Eigen::VectorXd logp, ph;
    const Eigen::VectorXcd psi = batch_psi(smat, theta_amp, theta_ph, logp, ph);

    const SupportLoss sl = support_restricted_loss(support, psi, n_, view, /*renormalize=*/true, /*grad=*/true);
    Eigen::VectorXd grad(parameter_count());
    accumulate_set_gradients(smat, theta_amp, theta_ph, psi, sl.dpsi, grad);
    return {sl.loss, std::move(grad)};
  }

  // Diagnostic objective -|<target|psi>|^2 / <psi|psi> by full enumeration.
  std::pair<double, Eigen::VectorXd> fidelity_objective(const StateVector& target) const {
    if (target.qubit_count != n_) throw std::invalid_argument("fidelity_objective: qubit counts differ");
    if (n_ > 20) throw std::invalid_argument("fidelity_objective: N too large for enumeration");
    const std::vector<std::uint64_t> full = full_support(n_);
    const Eigen::MatrixXd smat = support_matrix(full);
    Eigen::MatrixXd theta_amp, theta_ph;
    Eigen::VectorXd logp, ph;
    const Eigen::VectorXcd psi = batch_psi(smat, theta_amp, theta_ph, logp, ph);

    const double z = psi.squaredNorm();
    const Complex o = target.amplitudes.dot(psi);  // <target|psi>
    const double obj = -std::norm(o) / z;
    Eigen::VectorXcd dpsi = (-2.0 / z) * (o * target.amplitudes) + (2.0 * std::norm(o) / (z * z)) * psi;
    Eigen::VectorXd grad(parameter_count());
    accumulate_set_gradients(smat, theta_amp, theta_ph, psi, dpsi, grad);
    return {obj, std::move(grad)};
  }

  StateVector to_dense() const {
    if (n_ > 20) throw std::invalid_argument("to_dense: N too large for enumeration");
    const Eigen::MatrixXd smat = support_matrix(full_support(n_));
    Eigen::MatrixXd theta_amp, theta_ph;
    Eigen::VectorXd logp, ph;
    Eigen::VectorXcd amps = batch_psi(smat, theta_amp, theta_ph, logp, ph);
    StateVector state(n_, std::move(amps));
    state.normalize();
    return state;
  }

  // Packed order: W_l (column-major), a_l, b_l, W_m, a_m, b_m.
  Eigen::VectorXd parameters() const {
    Eigen::VectorXd p(parameter_count());
    Eigen::Index k = 0;
    k = pack_matrix(p, 0, w_amp_);
    k = pack_vector(p, k, a_amp_);
    k = pack_vector(p, k, b_amp_);
    k = pack_matrix(p, k, w_ph_);
    k = pack_vector(p, k, a_ph_);
    k = pack_vector(p, k, b_ph_);
    return p;
  }

  void set_parameters(const Eigen::VectorXd& p) {
    if (p.size() != parameter_count()) throw std::invalid_argument("set_parameters: size mismatch");
    Eigen::Index k = 0;
    k = unpack_matrix(p, 0, w_amp_);
    k = unpack_vector(p, k, a_amp_);
    k = unpack_vector(p, k, b_amp_);
    k = unpack_matrix(p, k, w_ph_);
    k = unpack_vector(p, k, a_ph_);
    k = unpack_vector(p, k, b_ph_);
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("RbmWavefunction::save: cannot open " + path);
    out << "VQSTRBM1 N=" << n_ << " H=" << h_ << " L=" << chain_count() << "\n";
    const Eigen::VectorXd p = parameters();
    out.write(reinterpret_cast<const char*>(p.data()), sizeof(double) * p.size());
    out.write(reinterpret_cast<const char*>(chains_.data()), sizeof(double) * chains_.size());
    std::ostringstream rs;
    rs << sampler_;
    const std::string rng_text = rs.str();
    const std::uint64_t len = rng_text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(rng_text.data(), static_cast<std::streamsize>(len));
    if (!out) throw std::runtime_error("RbmWavefunction::save: write failed for " + path);
  }

  static RbmWavefunction load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("RbmWavefunction::load: cannot open " + path);
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string magic, nf, hf, lf;
    hs >> magic >> nf >> hf >> lf;
    if (magic != "VQSTRBM1") throw std::runtime_error("RbmWavefunction::load: bad header in " + path);
    const int n = std::stoi(nf.substr(2));
    const int h = std::stoi(hf.substr(2));
    const int l = std::stoi(lf.substr(2));
    RbmWavefunction r(n, h, l, 0);
    Eigen::VectorXd p(r.parameter_count());
    in.read(reinterpret_cast<char*>(p.data()), sizeof(double) * p.size());
    in.read(reinterpret_cast<char*>(r.chains_.data()), sizeof(double) * r.chains_.size());
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len > (1u << 20)) throw std::runtime_error("RbmWavefunction::load: truncated file " + path);
    std::string rng_text(len, '\0');
    in.read(rng_text.data(), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error("RbmWavefunction::load: truncated file " + path);
    std::istringstream rs(rng_text);
    rs >> r.sampler_;
    r.set_parameters(p);
    return r;
  }

  static std::vector<std::uint64_t> full_support(int n) {
    std::vector<std::uint64_t> full(std::size_t(1) << n);
    for (std::size_t k = 0; k < full.size(); ++k) full[k] = k;
    return full;
  }

 private:
  static constexpr std::uint64_t kInitStream = 23;
  static constexpr std::uint64_t kSamplerStream = 29;

  double set_value(std::uint64_t s, const Eigen::MatrixXd& w, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) const {
    double linear = 0.0;
    Eigen::VectorXd act = b;
    for (int site = 0; site < n_; ++site) {
      if (!bit_at(s, n_, site)) continue;
      linear += a(site);
      act += w.row(site).transpose();
    }
    double total = linear;
    for (Eigen::Index i = 0; i < act.size(); ++i) total += softplus(act(i));
    return total;
  }

  Eigen::MatrixXd support_matrix(const std::vector<std::uint64_t>& support) const {
    Eigen::MatrixXd smat(static_cast<Eigen::Index>(support.size()), n_);
    for (std::size_t k = 0; k < support.size(); ++k)
      for (int c = 0; c < n_; ++c) smat(static_cast<Eigen::Index>(k), c) = bit_at(support[k], n_, c);
    return smat;
  }

  void set_batch(const Eigen::MatrixXd& smat, const Eigen::MatrixXd& w, const Eigen::VectorXd& a,
                 const Eigen::VectorXd& b, Eigen::MatrixXd& theta, Eigen::VectorXd& value) const {
    theta = (smat * w).rowwise() + b.transpose();
    value = smat * a;
    for (Eigen::Index r = 0; r < theta.rows(); ++r)
      for (Eigen::Index c = 0; c < theta.cols(); ++c) value(r) += softplus(theta(r, c));
  }

  // psi over the rows of smat, stabilized by the max log marginal (a real
  // positive rescale that the support normalization cancels exactly).
  Eigen::VectorXcd batch_psi(const Eigen::MatrixXd& smat, Eigen::MatrixXd& theta_amp,
                             Eigen::MatrixXd& theta_ph, Eigen::VectorXd& logp, Eigen::VectorXd& ph) const {
    set_batch(smat, w_amp_, a_amp_, b_amp_, theta_amp, logp);
    set_batch(smat, w_ph_, a_ph_, b_ph_, theta_ph, ph);
    const double shift = 0.5 * logp.maxCoeff();
    Eigen::VectorXcd psi(logp.size());
    for (Eigen::Index k = 0; k < psi.size(); ++k) psi(k) = std::exp(Complex(0.5 * logp(k) - shift, ph(k)));
    return psi;
  }

  // Chain rule from d(s) to both parameter sets:
  //   d loss/dp = sum_s Re(conj(d) psi (0.5 dlogp + i dphase))
  // so u = 0.5 Re(conj(d) psi) weights the amplitude set and
  // v = -Im(conj(d) psi) the phase set.
  void accumulate_set_gradients(const Eigen::MatrixXd& smat, const Eigen::MatrixXd& theta_amp,
                                const Eigen::MatrixXd& theta_ph, const Eigen::VectorXcd& psi,
                                const Eigen::VectorXcd& dpsi, Eigen::VectorXd& grad) const {
    const Eigen::Index count = psi.size();
    Eigen::VectorXd u(count), v(count);
    for (Eigen::Index k = 0; k < count; ++k) {
      const Complex e = std::conj(dpsi(k)) * psi(k);
      u(k) = 0.5 * e.real();
      v(k) = -e.imag();
    }
    Eigen::MatrixXd sig_amp = theta_amp.unaryExpr([](double x) { return sigmoid(x); });
    Eigen::MatrixXd sig_ph = theta_ph.unaryExpr([](double x) { return sigmoid(x); });

    Eigen::MatrixXd gw_amp = smat.transpose() * (sig_amp.array().colwise() * u.array()).matrix();
    Eigen::VectorXd ga_amp = smat.transpose() * u;
    Eigen::VectorXd gb_amp = sig_amp.transpose() * u;
    Eigen::MatrixXd gw_ph = smat.transpose() * (sig_ph.array().colwise() * v.array()).matrix();
    Eigen::VectorXd ga_ph = smat.transpose() * v;
    Eigen::VectorXd gb_ph = sig_ph.transpose() * v;

    Eigen::Index k = 0;
    k = pack_matrix(grad, 0, gw_amp);
    k = pack_vector(grad, k, ga_amp);
    k = pack_vector(grad, k, gb_amp);
    k = pack_matrix(grad, k, gw_ph);
    k = pack_vector(grad, k, ga_ph);
    k = pack_vector(grad, k, gb_ph);
  }

  static Eigen::Index pack_matrix(Eigen::VectorXd& p, Eigen::Index k, const Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) p(k++) = m(r, c);
    return k;
  }
  static Eigen::Index pack_vector(Eigen::VectorXd& p, Eigen::Index k, const Eigen::VectorXd& v) {
    for (Eigen::Index r = 0; r < v.size(); ++r) p(k++) = v(r);
    return k;
  }
  static Eigen::Index unpack_matrix(const Eigen::VectorXd& p, Eigen::Index k, Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = p(k++);
    return k;
  }
  static Eigen::Index unpack_vector(const Eigen::VectorXd& p, Eigen::Index k, Eigen::VectorXd& v) {
    for (Eigen::Index r = 0; r < v.size(); ++r) v(r) = p(k++);
    return k;
  }

  int n_;
  int h_;
  Eigen::MatrixXd w_amp_, w_ph_;      // N x H
  Eigen::VectorXd a_amp_, a_ph_;      // N
  Eigen::VectorXd b_amp_, b_ph_;      // H
  Eigen::MatrixXd chains_;            // L x N of 0/1
  std::mt19937_64 sampler_;
  std::vector<std::uint64_t> support_;
};

}  // namespace vqst
