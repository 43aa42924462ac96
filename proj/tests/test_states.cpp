#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "su2depol/errors.hpp"
#include "test_support.hpp"

using namespace su2depol;
using testutil::mdiff;

TEST_CASE("state factories produce normalized physical states") {
  for (const DensityState& state :
       {coherent_density(3, CoherentPoint{1.0, 0.5}), noon_state(4), twin_state(4),
        fock_state(3, 1), maximally_mixed(2)}) {
    CHECK(validate(state).empty());
  }
  CHECK(purity(noon_state(3)) == doctest::Approx(1.0));
  CHECK(purity(maximally_mixed(3)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(twin_state(3), std::invalid_argument);   // odd photon number
  CHECK_THROWS_AS(fock_state(2, 5), std::invalid_argument);
  CHECK_THROWS_AS(noon_state(0), std::invalid_argument);
}

TEST_CASE("noon and twin states carry no mean stokes vector") {
  for (const DensityState& state : {noon_state(3), twin_state(4)}) {
    StokesVector sv = stokes_parameters(state);
    CHECK(sv.s.norm() < 1e-13);
  }
  CHECK(stokes_parameters(noon_state(3)).s0 == doctest::Approx(3.0));
  CHECK(stokes_parameters(twin_state(4)).s0 == doctest::Approx(4.0));
}

TEST_CASE("coherent density has mean spin n omega and transverse variance n") {
  int n = 4;
  CoherentPoint p{0.8, 1.9};
  DensityState state = coherent_density(n, p);
  StokesVector sv = stokes_parameters(state);
  CHECK(sv.s0 == doctest::Approx(n));
  CHECK((sv.s - n * p.omega()).norm() < 1e-12);
  PrincipalComponents pc = principal_components(state);
  // Variances n, n transverse to the mean spin and 0 along it, descending.
  CHECK(pc.variances(0) == doctest::Approx(n).epsilon(1e-10));
  CHECK(pc.variances(1) == doctest::Approx(n).epsilon(1e-10));
  CHECK(std::abs(pc.variances(2)) < 1e-10);
  CHECK(std::abs(pc.axes.col(2).dot(p.omega())) == doctest::Approx(1.0));
  CHECK(total_variance(state) == doctest::Approx(2.0 * n));
}

TEST_CASE("twin beam variances concentrate in the equatorial plane") {
  DensityState state = twin_state(2);  // |1,1>
  CovarianceData cov = covariance(state);
  CHECK(cov.covariance(0, 0) == doctest::Approx(4.0));
  CHECK(cov.covariance(1, 1) == doctest::Approx(4.0));
  CHECK(std::abs(cov.covariance(2, 2)) < 1e-13);
  CHECK(cov.mean_outer.norm() < 1e-13);
  CHECK(mean_total_spin_square(state) == doctest::Approx(8.0));
}

TEST_CASE("mixtures combine sector observables with their weights") {
  DensityState state;
  state.sectors[1] = SectorBlock{0.25, coherent_density(1, CoherentPoint{}).sectors.at(1).rho};
  state.sectors[3] = SectorBlock{0.75, maximally_mixed(3).sectors.at(3).rho};
  CHECK(validate(state).empty());
  StokesVector sv = stokes_parameters(state);
  CHECK(sv.s0 == doctest::Approx(0.25 * 1 + 0.75 * 3));
  CHECK((sv.s - Vec3(0, 0, 0.25)).norm() < 1e-13);
  CHECK(purity(state) == doctest::Approx(0.25 * 0.25 * 1.0 + 0.75 * 0.75 * 0.25));
  CHECK(mean_total_spin_square(state) == doctest::Approx(0.25 * 3 + 0.75 * 15));
}

TEST_CASE("random blocks are physical and deterministic in the stream seed") {
  RngStream a(42), b(42), c(43);
  Matrix first = random_block(3, a);
  Matrix second = random_block(3, b);
  Matrix third = random_block(3, c);
  CHECK(mdiff(first, second) == 0.0);
  CHECK(mdiff(first, third) > 1e-3);
  DensityState state;
  state.sectors[3] = SectorBlock{1.0, first};
  CHECK(validate(state).empty());
}

TEST_CASE("rotation preserves the invariant observables") {
  DensityState state = testutil::random_mixture(2, 4, 7);
  RotationVector u = testutil::random_rotation_vector(8);
  DensityState moved = rotated(state, u);
  CHECK(validate(moved).empty());
  CHECK(purity(moved) == doctest::Approx(purity(state)).epsilon(1e-12));
  CHECK(total_variance(moved) == doctest::Approx(total_variance(state)).epsilon(1e-10));
  StokesVector before = stokes_parameters(state);
  StokesVector after = stokes_parameters(moved);
  CHECK(after.s0 == doctest::Approx(before.s0));
  CHECK(after.s.norm() == doctest::Approx(before.s.norm()).epsilon(1e-10));
  // The mean vector moves by exactly the extracted rotation matrix.
  CHECK((after.s - rotation_of(u, 1) * before.s).norm() < 1e-10);
}

TEST_CASE("trace distance separates orthogonal states and vanishes on equals") {
  DensityState a = fock_state(1, 1);
  DensityState b = fock_state(1, 0);
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  // States living in different sectors are at maximal distance.
  CHECK(trace_distance(fock_state(0, 0), fock_state(1, 0)) == doctest::Approx(1.0));
  DensityState mix = testutil::random_mixture(1, 2, 99);
  CHECK(trace_distance(mix, mix) < 1e-15);
  CHECK(trace_distance(mix, maximally_mixed(1)) <= 1.0 + 1e-12);
}

TEST_CASE("validation reports each violated invariant") {
  DensityState bad;
  Matrix block(2, 2);
  block << Complex(1.5, 0.0), Complex(0.2, 0.1), Complex(0.0, 0.3), Complex(-0.5, 0.0);
  bad.sectors[1] = SectorBlock{1.2, block};
  bad.sectors[2] = SectorBlock{-0.2, Matrix::Identity(3, 3) / 3.0};
  std::vector<std::string> problems = validate(bad);
  CHECK(problems.size() >= 3);  // non-hermitian, negative eigenvalue, bad weight
  bool mentions_weight = false, mentions_hermitian = false;
  for (const std::string& p : problems) {
    if (p.find("weight") != std::string::npos) mentions_weight = true;
    if (p.find("ermitian") != std::string::npos) mentions_hermitian = true;
  }
  CHECK(mentions_weight);
  CHECK(mentions_hermitian);

  DensityState wrong_dim;
  wrong_dim.sectors[2] = SectorBlock{1.0, Matrix::Identity(2, 2) / 2.0};
  CHECK(!validate(wrong_dim).empty());

  DensityState off_trace;
  off_trace.sectors[1] = SectorBlock{1.0, 0.9 * Matrix::Identity(2, 2)};
  CHECK(!validate(off_trace).empty());
}

TEST_CASE("json serialization round trips bit-for-bit") {
  DensityState state = testutil::random_mixture(0, 3, 1234);
  DensityState back = state_from_json(to_json(state));
  REQUIRE(back.sectors.size() == state.sectors.size());
  for (const auto& [n, block] : state.sectors) {
    CHECK(back.sectors.at(n).weight == block.weight);
    CHECK(mdiff(back.sectors.at(n).rho, block.rho) == 0.0);
  }
}

TEST_CASE("json loading rejects malformed or unphysical input") {
  CHECK_THROWS_AS(state_from_json("not json at all"), ConfigError);
  CHECK_THROWS_AS(state_from_json("{\"sectors\": 4}"), ConfigError);
  CHECK_THROWS_AS(state_from_json("{}"), ConfigError);
  // Physically invalid (trace 2) must be rejected with a validation message.
  std::string bad =
      "{\"sectors\": [{\"n\": 0, \"weight\": 1.0, \"re\": [[2.0]], \"im\": [[0.0]]}]}";
  CHECK_THROWS_AS(state_from_json(bad), ConfigError);
  // Duplicate sector entries are ambiguous.
  std::string dup =
      "{\"sectors\": [{\"n\": 0, \"weight\": 0.5, \"re\": [[1.0]], \"im\": [[0.0]]},"
      " {\"n\": 0, \"weight\": 0.5, \"re\": [[1.0]], \"im\": [[0.0]]}]}";
  CHECK_THROWS_AS(state_from_json(dup), ConfigError);
}

TEST_CASE("state files save and load through the filesystem") {
  DensityState state = noon_state(2);
  std::string path = "test_states_roundtrip.json";
  save_state_json(state, path);
  DensityState back = load_state_json(path);
  CHECK(trace_distance(state, back) < 1e-15);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_state_json("no_such_directory/missing.json"), IoError);
}
