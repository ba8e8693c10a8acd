#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "vqst/core.hpp"

namespace vqst {

// State-vector file: one ASCII header line "VQSTSV1 N=<n>\n" followed by
// 2^n little-endian (real, imaginary) double pairs in index order.
inline void write_state(const std::string& path, const StateVector& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_state: cannot open " + path);
  out << "VQSTSV1 N=" << state.qubit_count << "\n";
  for (std::int64_t k = 0; k < state.dim(); ++k) {
    const double re = state.amplitudes(k).real();
    const double im = state.amplitudes(k).imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(double));
    out.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
  if (!out) throw std::runtime_error("write_state: write failed for " + path);
}

inline StateVector read_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_state: cannot open " + path);
  std::string header;
  std::getline(in, header);
  int n = -1;
  if (header.rfind("VQSTSV1 N=", 0) == 0) n = std::stoi(header.substr(10));
  if (n < 1 || n > 30) throw std::runtime_error("read_state: bad header in " + path);
  Eigen::VectorXcd amps(std::int64_t(1) << n);
  for (std::int64_t k = 0; k < amps.size(); ++k) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof(double));
    in.read(reinterpret_cast<char*>(&im), sizeof(double));
    if (!in) throw std::runtime_error("read_state: truncated file " + path);
    amps(k) = Complex(re, im);
  }
  return StateVector(n, std::move(amps));
}

}  // namespace vqst
