#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "support/oracles.hpp"
#include "vqst/measurement.hpp"

using namespace vqst;
using Catch::Approx;

TEST_CASE("periodicity-3 basis generation", "[measurement]") {
  const auto bases20 = generate_bases(20);
  REQUIRE(bases20.size() == 27);
  // lexicographic order with X<Y<Z: (X,Y,Z) is triple index 0*9+1*3+2 = 5
  REQUIRE(pauli_string_to_string(bases20[5]) == "XYZXYZXYZXYZXYZXYZXY");
  REQUIRE(pauli_string_to_string(bases20[0]) == std::string(20, 'X'));
  REQUIRE(pauli_string_to_string(bases20[26]) == std::string(20, 'Z'));

  const auto bases4 = generate_bases(4);
  REQUIRE(pauli_string_to_string(bases4[0]) == "XXXX");

  // all bases distinct for any N >= 3
  for (int n : {3, 4, 7}) {
    auto bases = generate_bases(n);
    std::vector<std::string> strs;
    for (const auto& b : bases) strs.push_back(pauli_string_to_string(b));
    std::sort(strs.begin(), strs.end());
    REQUIRE(std::unique(strs.begin(), strs.end()) == strs.end());
    REQUIRE(strs.size() == 27);
  }
  REQUIRE_THROWS_AS(generate_bases(2), std::invalid_argument);

  // tiling property: site l carries pattern[(l-1) mod 3]
  const auto bases7 = generate_bases(7);
  for (std::size_t k = 0; k < bases7.size(); ++k)
    for (int site = 0; site < 7; ++site) REQUIRE(bases7[k][site] == bases7[k][site % 3]);
}

TEST_CASE("sampling from a deterministic state", "[measurement]") {
  const StateVector zero = StateVector::computational_basis(4, 0);
  std::vector<PauliString> allz{parse_pauli_string("ZZZZ")};
  const MeasurementDataset d = sample_dataset(zero, allz, 50, 1);
  REQUIRE(d.outcomes[0].size() == 50);
  for (std::uint64_t j : d.outcomes[0]) REQUIRE(j == 0);
}

TEST_CASE("sampling is reproducible and seed-sensitive", "[measurement]") {
  const StateVector state = oracle::random_state(5, 4);
  const auto bases = generate_bases(5);
  const MeasurementDataset a = sample_dataset(state, bases, 40, 123);
  const MeasurementDataset b = sample_dataset(state, bases, 40, 123);
  const MeasurementDataset c = sample_dataset(state, bases, 40, 124);
  REQUIRE(a == b);
  REQUIRE(a != c);
}

TEST_CASE("single-qubit |+> sampled in Z is a fair coin", "[measurement]") {
  Eigen::VectorXcd amps(2);
  amps << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const StateVector plus(1, std::move(amps));
  std::vector<PauliString> z{{Pauli::Z}};
  const int shots = 100000;
  const MeasurementDataset d = sample_dataset(plus, z, shots, 7);
  std::int64_t zeros = 0;
  for (std::uint64_t j : d.outcomes[0]) zeros += (j == 0);
  const double freq = static_cast<double>(zeros) / shots;
  const double sigma = 0.5 / std::sqrt(static_cast<double>(shots));
  REQUIRE(std::abs(freq - 0.5) < 4.0 * sigma);
}

TEST_CASE("empirical distribution approaches the exact one", "[measurement]") {
  const int n = 6;
  const StateVector state = oracle::random_state(n, 8);
  const PauliString basis = parse_pauli_string("XYZZYX");
  const int shots = 100000;
  const MeasurementDataset d = sample_dataset(state, {basis}, shots, 3);

  const Eigen::VectorXcd rotated = oracle::dense_rotation(basis) * state.amplitudes;
  std::vector<double> counts(std::size_t(1) << n, 0.0);
  for (std::uint64_t j : d.outcomes[0]) counts[j] += 1.0;
  double tv = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k)
    tv += 0.5 * std::abs(counts[k] / shots - std::norm(rotated(static_cast<Eigen::Index>(k))));
  REQUIRE(tv < 5.0 / std::sqrt(static_cast<double>(shots)));
}

TEST_CASE("dataset file round-trip is bit-exact", "[measurement]") {
  const StateVector state = oracle::random_state(4, 15);
  const MeasurementDataset d = sample_dataset(state, generate_bases(4), 25, 77);
  const std::string path = "test_dataset_roundtrip.vqst1";
  write_dataset(d, path);
  const MeasurementDataset back = read_dataset(path);
  REQUIRE(back == d);
  std::remove(path.c_str());
}

TEST_CASE("dataset parser reports the offending line", "[measurement]") {
  const std::string path = "test_dataset_bad.vqst1";
  {
    std::ofstream out(path);
    out << "VQST1 N=6 K=1\n";
    out << "BASIS 0 XYZXYZ\n";
    out << "0 01010\n";  // 5 chars, line 3
  }
  try {
    read_dataset(path);
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    REQUIRE(std::string(e.what()).find(":3:") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("empty per-basis record lists are valid", "[measurement]") {
  const std::string path = "test_dataset_empty.vqst1";
  {
    std::ofstream out(path);
    out << "VQST1 N=3 K=2\n";
    out << "BASIS 0 XYZ\n";
    out << "BASIS 1 ZZZ\n";
    out << "1 010\n";
  }
  const MeasurementDataset d = read_dataset(path);
  REQUIRE(d.outcomes[0].empty());
  REQUIRE(d.outcomes[1].size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("split follows the 4:1 prefix rule", "[measurement]") {
  const StateVector state = oracle::random_state(4, 31);
  MeasurementDataset d = sample_dataset(state, generate_bases(4), 1000, 5);
  auto [train, test] = split(d);
  for (std::size_t p = 0; p < d.outcomes.size(); ++p) {
    REQUIRE(train.records[p].size() == 800);
    REQUIRE(test.records[p].size() == 200);
    REQUIRE(train.records[p].data() == d.outcomes[p].data());               // prefix
    REQUIRE(test.records[p].data() == d.outcomes[p].data() + 800);          // suffix
  }

  MeasurementDataset tiny = sample_dataset(state, generate_bases(4), 5, 5);
  auto [tr, te] = split(tiny);
  REQUIRE(tr.records[0].size() == 4);
  REQUIRE(te.records[0].size() == 1);

  MeasurementDataset toosmall = sample_dataset(state, generate_bases(4), 4, 5);
  REQUIRE_THROWS_AS(split(toosmall), std::invalid_argument);
}
