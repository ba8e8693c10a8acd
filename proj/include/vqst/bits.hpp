#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vqst {

// A length-N bit configuration s = (s_1, ..., s_N) is packed into an integer
// with qubit 1 as the most significant bit: index = sum_i s_i * 2^(N-i).

inline int bit_at(std::uint64_t index, int n, int site) {
  return static_cast<int>((index >> (n - 1 - site)) & 1u);
}

inline std::uint64_t encode_bits(const std::vector<int>& bits) {
  std::uint64_t index = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("encode_bits: bit value must be 0 or 1");
    index = (index << 1) | static_cast<std::uint64_t>(b);
  }
  return index;
}

inline std::vector<int> decode_bits(std::uint64_t index, int n) {
  std::vector<int> bits(n);
  for (int site = 0; site < n; ++site) bits[site] = bit_at(index, n, site);
  return bits;
}

inline std::string bits_to_string(std::uint64_t index, int n) {
  std::string s(n, '0');
  for (int site = 0; site < n; ++site) s[site] = bit_at(index, n, site) ? '1' : '0';
  return s;
}

inline std::uint64_t string_to_bits(const std::string& s) {
  std::uint64_t index = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("string_to_bits: expected '0'/'1', got '" + std::string(1, c) + "'");
    index = (index << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return index;
}

inline int popcount(std::uint64_t index) { return std::popcount(index); }

}  // namespace vqst
