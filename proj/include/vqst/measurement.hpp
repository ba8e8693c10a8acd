#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqst/core.hpp"
#include "vqst/rng.hpp"

namespace vqst {

// The 27 periodicity-3 measurement bases: every triple (i,j,k) of X,Y,Z in
// lexicographic order (X<Y<Z), tiled as site_l = triple[(l-1) mod 3] and
// truncated to length N.
inline std::vector<PauliString> generate_bases(int n) {
  if (n < 3) throw std::invalid_argument("generate_bases: N must be >= 3");
  constexpr Pauli order[3] = {Pauli::X, Pauli::Y, Pauli::Z};
  std::vector<PauliString> bases;
  bases.reserve(27);
  for (Pauli a : order)
    for (Pauli b : order)
      for (Pauli c : order) {
        const Pauli triple[3] = {a, b, c};
        PauliString basis(n);
        for (int site = 0; site < n; ++site) basis[site] = triple[site % 3];
        bases.push_back(std::move(basis));
      }
  return bases;
}

// Outcome bitstrings per basis, kept in acquisition order; the 4:1
// train/test split is a prefix rule over that order.
struct MeasurementDataset {
  int qubit_count = 0;
  std::vector<PauliString> bases;
  std::vector<std::vector<std::uint64_t>> outcomes;  // [basis][shot]

  std::int64_t total_shots() const {
    std::int64_t total = 0;
    for (const auto& v : outcomes) total += static_cast<std::int64_t>(v.size());
    return total;
  }

  bool operator==(const MeasurementDataset& other) const = default;
};

// Non-owning per-basis views into a dataset (training or test portion).
struct DatasetSlice {
  int qubit_count = 0;
  const std::vector<PauliString>* bases = nullptr;
  std::vector<std::span<const std::uint64_t>> records;

  std::int64_t total_records() const {
    std::int64_t total = 0;
    for (const auto& r : records) total += static_cast<std::int64_t>(r.size());
    return total;
  }
};

inline DatasetSlice slice_all(const MeasurementDataset& d) {
  DatasetSlice s;
  s.qubit_count = d.qubit_count;
  s.bases = &d.bases;
  s.records.reserve(d.outcomes.size());
  for (const auto& v : d.outcomes) s.records.emplace_back(v.data(), v.size());
  return s;
}

// First ceil(0.8*M_p) records of each basis are training data, the rest test;
// no shuffling.
inline std::pair<DatasetSlice, DatasetSlice> split(const MeasurementDataset& d) {
  DatasetSlice train, test;
  train.qubit_count = test.qubit_count = d.qubit_count;
  train.bases = test.bases = &d.bases;
  for (std::size_t p = 0; p < d.outcomes.size(); ++p) {
    const auto& v = d.outcomes[p];
    if (v.size() < 5)
      throw std::invalid_argument("split: basis " + std::to_string(p) + " has fewer than 5 records");
    const std::size_t cut = (v.size() * 4 + 4) / 5;  // ceil(0.8*M)
    train.records.emplace_back(v.data(), cut);
    test.records.emplace_back(v.data() + cut, v.size() - cut);
  }
  return {std::move(train), std::move(test)};
}

// Draws shots_per_basis outcomes per basis with probability |<j|U_p|state>|^2,
// by inverse-CDF sampling on an independently seeded stream per basis.
inline MeasurementDataset sample_dataset(const StateVector& state, const std::vector<PauliString>& bases,
                                         int shots_per_basis, std::uint64_t seed) {
  if (!state.is_normalized(1e-8)) throw std::invalid_argument("sample_dataset: state must be normalized");
  MeasurementDataset data;
  data.qubit_count = state.qubit_count;
  data.bases = bases;
  data.outcomes.resize(bases.size());
  std::vector<double> cdf(static_cast<std::size_t>(state.dim()));
  for (std::size_t p = 0; p < bases.size(); ++p) {
    const StateVector rotated = apply_local_rotation(state, bases[p]);
    double acc = 0.0;
    for (std::int64_t k = 0; k < rotated.dim(); ++k) {
      acc += std::norm(rotated.amplitudes(k));
      cdf[static_cast<std::size_t>(k)] = acc;
    }
    auto gen = rng_stream(seed, p);
    auto& shots = data.outcomes[p];
    shots.reserve(shots_per_basis);
    for (int m = 0; m < shots_per_basis; ++m) {
      const double u = uniform_double(gen) * acc;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      shots.push_back(static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), state.dim() - 1)));
    }
  }
  return data;
}

// VQST1 dataset file: header "VQST1 N=<n> K=<k>", one "BASIS <idx> <paulis>"
// line per basis, then one "<basis-idx> <bitstring>" line per shot in
// acquisition order. ASCII, newline-terminated.
inline void write_dataset(const MeasurementDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset: cannot open " + path);
  out << "VQST1 N=" << d.qubit_count << " K=" << d.bases.size() << "\n";
  for (std::size_t p = 0; p < d.bases.size(); ++p)
    out << "BASIS " << p << " " << pauli_string_to_string(d.bases[p]) << "\n";
  for (std::size_t p = 0; p < d.outcomes.size(); ++p)
    for (std::uint64_t j : d.outcomes[p])
      out << p << " " << bits_to_string(j, d.qubit_count) << "\n";
  if (!out) throw std::runtime_error("write_dataset: write failed for " + path);
}

inline MeasurementDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dataset: cannot open " + path);
  auto fail = [&path](long line_no, const std::string& what) {
    throw std::runtime_error("read_dataset: " + path + ":" + std::to_string(line_no) + ": " + what);
  };

  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) fail(1, "empty file");
  ++line_no;
  int n = 0;
  std::size_t k = 0;
  {
    std::istringstream hs(line);
    std::string magic, nf, kf;
    hs >> magic >> nf >> kf;
    if (magic != "VQST1" || nf.rfind("N=", 0) != 0 || kf.rfind("K=", 0) != 0) fail(line_no, "malformed header");
    try {
      n = std::stoi(nf.substr(2));
      k = static_cast<std::size_t>(std::stoul(kf.substr(2)));
    } catch (const std::exception&) {
      fail(line_no, "malformed header");
    }
    if (n < 1 || n > 63) fail(line_no, "qubit count out of range");
  }

  MeasurementDataset d;
  d.qubit_count = n;
  d.bases.resize(k);
  d.outcomes.resize(k);
  for (std::size_t p = 0; p < k; ++p) {
    if (!std::getline(in, line)) fail(line_no + 1, "missing BASIS line");
    ++line_no;
    std::istringstream bs(line);
    std::string tag, paulis;
    std::size_t idx = 0;
    bs >> tag >> idx >> paulis;
    if (tag != "BASIS" || idx != p) fail(line_no, "malformed BASIS line");
    if (paulis.size() != static_cast<std::size_t>(n)) fail(line_no, "basis string length != N");
    try {
      d.bases[p] = parse_pauli_string(paulis);
    } catch (const std::exception& e) {
      fail(line_no, e.what());
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::size_t idx = 0;
    std::string bits;
    if (!(rs >> idx >> bits)) fail(line_no, "malformed record line");
    if (idx >= k) fail(line_no, "basis index out of range");
    if (bits.size() != static_cast<std::size_t>(n)) fail(line_no, "bitstring length != N");
    try {
      d.outcomes[idx].push_back(string_to_bits(bits));
    } catch (const std::exception& e) {
      fail(line_no, e.what());
    }
  }
  return d;
}

}  // namespace vqst
