#include <catch2/catch_amalgamated.hpp>

#include "support/oracles.hpp"
#include "vqst/bits.hpp"
#include "vqst/core.hpp"
#include "vqst/state_io.hpp"

using namespace vqst;
using Catch::Approx;

TEST_CASE("bit index round-trips exhaustively", "[core]") {
  for (int n : {2, 5, 12}) {
    for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << n); ++idx) {
      REQUIRE(encode_bits(decode_bits(idx, n)) == idx);
      REQUIRE(string_to_bits(bits_to_string(idx, n)) == idx);
    }
  }
  // qubit 1 is the most significant bit
  REQUIRE(encode_bits({1, 0, 1, 0}) == 10);
  REQUIRE(bits_to_string(10, 4) == "1010");
  REQUIRE(bit_at(10, 4, 0) == 1);
  REQUIRE(bit_at(10, 4, 3) == 0);
  REQUIRE_THROWS_AS(string_to_bits("10a1"), std::invalid_argument);
}

TEST_CASE("rotation matrices", "[core]") {
  // Z eigenbasis is the computational basis
  REQUIRE((rotation_matrix(Pauli::Z) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() == 0.0);

  // row 0 of V(X) applied to |+> yields amplitude 1 on outcome bit 0
  Eigen::Vector2cd plus;
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Eigen::Vector2cd rotated_plus = rotation_matrix(Pauli::X) * plus;
  REQUIRE(std::abs(rotated_plus(0) - Complex(1.0, 0.0)) < 1e-14);
  REQUIRE(std::abs(rotated_plus(1)) < 1e-14);

  // unitarity of all three factors
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    const Eigen::Matrix2cd v = rotation_matrix(p);
    REQUIRE((v * v.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= 1e-14);
  }

  // bit 0 maps the +1 eigenvector of Y, bit 1 the -1 eigenvector
  Eigen::Vector2cd y_plus;
  y_plus << 1.0 / std::sqrt(2.0), Complex(0.0, 1.0) / std::sqrt(2.0);
  const Eigen::Vector2cd rotated_y = rotation_matrix(Pauli::Y) * y_plus;
  REQUIRE(std::abs(rotated_y(0) - Complex(1.0, 0.0)) < 1e-14);
  REQUIRE(std::abs(rotated_y(1)) < 1e-14);
}

TEST_CASE("apply_local_rotation matches the dense Kronecker oracle", "[core]") {
  const int n = 6;
  const StateVector state = oracle::random_state(n, 42);
  const PauliString basis = parse_pauli_string("XYZYXZ");

  const StateVector rotated = apply_local_rotation(state, basis);
  REQUIRE(std::abs(rotated.norm() - 1.0) <= 1e-12);

  const Eigen::VectorXcd expected = oracle::dense_rotation(basis) * state.amplitudes;
  REQUIRE((rotated.amplitudes - expected).cwiseAbs().maxCoeff() < 1e-12);

  // all-Z basis leaves any state unchanged
  const StateVector unchanged = apply_local_rotation(state, parse_pauli_string("ZZZZZZ"));
  REQUIRE((unchanged.amplitudes - state.amplitudes).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-qubit X rotation maps |+> to |0>", "[core]") {
  Eigen::VectorXcd amps(2);
  amps << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  StateVector plus(1, std::move(amps));
  const StateVector rotated = apply_local_rotation(plus, {Pauli::X});
  REQUIRE(std::abs(rotated.amplitudes(0) - Complex(1.0, 0.0)) < 1e-14);
  REQUIRE(std::abs(rotated.amplitudes(1)) < 1e-14);
}

TEST_CASE("rotation composed with conjugate-transposed factors is identity", "[core]") {
  const int n = 5;
  const StateVector state = oracle::random_state(n, 7);
  const PauliString basis = parse_pauli_string("YXZXY");
  StateVector rotated = apply_local_rotation(state, basis);
  for (int site = 0; site < n; ++site) {
    const Eigen::Matrix2cd v = rotation_matrix(basis[site]).adjoint();
    apply_single_qubit(rotated.amplitudes, n, site, v);
  }
  REQUIRE((rotated.amplitudes - state.amplitudes).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fidelity basics", "[core]") {
  const StateVector a = oracle::random_state(4, 3);
  REQUIRE(fidelity(a, a) == Approx(1.0).margin(1e-12));

  const StateVector e0 = StateVector::computational_basis(4, 0);
  const StateVector e7 = StateVector::computational_basis(4, 7);
  REQUIRE(fidelity(e0, e7) == 0.0);

  auto gen = rng_stream(11, 0);
  const double theta = 2.0 * std::numbers::pi * uniform_double(gen);
  StateVector phased = a;
  phased.amplitudes *= std::exp(Complex(0.0, theta));
  REQUIRE(fidelity(a, phased) == Approx(1.0).margin(1e-12));

  StateVector unnorm = a;
  unnorm.amplitudes *= 2.0;
  REQUIRE_THROWS_AS(fidelity(a, unnorm), std::invalid_argument);
  REQUIRE_THROWS_AS(fidelity(a, oracle::random_state(5, 3)), std::invalid_argument);
}

TEST_CASE("overlap equals the rotated amplitude", "[core]") {
  // all-Z basis picks out computational amplitudes exactly
  const StateVector e5 = StateVector::computational_basis(4, 5);
  const PauliString allz = parse_pauli_string("ZZZZ");
  REQUIRE(std::abs(overlap(5, allz, e5) - Complex(1.0, 0.0)) == 0.0);
  REQUIRE(std::abs(overlap(3, allz, e5)) == 0.0);

  const int n = 4;
  const StateVector state = oracle::random_state(n, 21);
  const PauliString basis = parse_pauli_string("YZXY");
  const Eigen::MatrixXcd u = oracle::dense_rotation(basis);
  for (std::uint64_t j = 0; j < 16; ++j) {
    const Complex expected = (u * state.amplitudes)(static_cast<Eigen::Index>(j));
    REQUIRE(std::abs(overlap(j, basis, state) - expected) < 1e-12);
  }
}

TEST_CASE("rotated outcome probabilities sum to one", "[core]") {
  const int n = 4;
  const StateVector state = oracle::random_state(n, 99);
  for (const std::string& b : {"XXXX", "YYYY", "XYZX", "ZYXZ"}) {
    double total = 0.0;
    for (std::uint64_t j = 0; j < (std::uint64_t(1) << n); ++j)
      total += std::norm(overlap(j, parse_pauli_string(b), state));
    REQUIRE(total == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("state file round-trips bit-exactly", "[core]") {
  const StateVector state = oracle::random_state(6, 5);
  const std::string path = "test_state_roundtrip.vqsv";
  write_state(path, state);
  const StateVector back = read_state(path);
  REQUIRE(back.qubit_count == 6);
  REQUIRE((back.amplitudes - state.amplitudes).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("pauli string parsing", "[core]") {
  REQUIRE(pauli_string_to_string(parse_pauli_string("XYZZY")) == "XYZZY");
  REQUIRE_THROWS_AS(parse_pauli_string("XQZ"), std::invalid_argument);
}
