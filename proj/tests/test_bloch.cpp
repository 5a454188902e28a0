#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "qjm/bloch.hpp"

using namespace qjm;

TEST_CASE("outcome probabilities") {
  SUBCASE("eigenstate") {
    const auto p = outcome_probabilities({{1, 0, 0}}, {{1, 0, 0}});
    CHECK(p.plus == doctest::Approx(1.0));
    CHECK(p.minus == doctest::Approx(0.0));
  }
  SUBCASE("trivial measurement") {
    const auto p = outcome_probabilities({{0, 0, 0}}, {{0.3, -0.2, 0.1}});
    CHECK(p.plus == 0.5);
    CHECK(p.minus == 0.5);
  }
  SUBCASE("matches 2x2 trace") {
    const Vec3 m{0, 0, 1};
    const Vec3 r{0.6, 0, 0.8};
    const double expected = oracle::prob_plus_by_trace(m, r);
    CHECK(expected == doctest::Approx(0.9).epsilon(1e-14));
    const auto p = outcome_probabilities({m}, {r});
    CHECK(p.plus == doctest::Approx(expected).epsilon(1e-14));
    CHECK(p.minus == doctest::Approx(0.1).epsilon(1e-14));
  }
  SUBCASE("rejects out-of-ball inputs") {
    CHECK_THROWS_AS((void)outcome_probabilities({{1.1, 0, 0}}, {{0, 0, 0}}), InvalidInput);
    CHECK_THROWS_AS((void)outcome_probabilities({{0, 0, 0}}, {{0, 0, 1.0 + 1e-9}}), InvalidInput);
    CHECK_NOTHROW((void)outcome_probabilities({{0, 0, 1.0 + 1e-13}}, {{0, 0, 1}}));
  }
}

TEST_CASE("probabilities normalized and agree with trace on random inputs") {
  Rng rng = make_rng(7);
  for (int k = 0; k < 2000; ++k) {
    const Vec3 m = random_in_ball(rng);
    const Vec3 r = random_in_ball(rng);
    const auto p = outcome_probabilities({m}, {r});
    CHECK(p.plus + p.minus == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.plus >= -kValidationTol);
    CHECK(p.plus <= 1.0 + kValidationTol);
    CHECK(std::abs(p.plus - oracle::prob_plus_by_trace(m, r)) < 1e-14);
  }
}

TEST_CASE("derived p-vectors") {
  SUBCASE("pauli gives a regular tetrahedron") {
    const auto p = derived_p_vectors(oracle::kPauli);
    CHECK(p[0] == Vec3{1, 1, 1});
    CHECK(p[1] == Vec3{1, -1, -1});
    CHECK(p[2] == Vec3{-1, 1, -1});
    CHECK(p[3] == Vec3{-1, -1, 1});
  }
  SUBCASE("zero vectors") {
    const auto p = derived_p_vectors(MeasurementTuple{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    for (const auto& v : p) CHECK(v == Vec3{});
  }
  SUBCASE("collinear") {
    const double a = 0.1, b = 0.3, c = -0.5;
    const auto p = derived_p_vectors(MeasurementTuple{{a, 0, 0}, {b, 0, 0}, {c, 0, 0}});
    CHECK(p[0].x == doctest::Approx(a + b + c));
    CHECK(p[1].x == doctest::Approx(a - b - c));
    CHECK(p[2].x == doctest::Approx(b - a - c));
    CHECK(p[3].x == doctest::Approx(c - a - b));
  }
  SUBCASE("arity mismatch") {
    CHECK_THROWS_AS((void)derived_p_vectors(MeasurementTuple{{1, 0, 0}, {0, 1, 0}}), ArityMismatch);
  }
}

TEST_CASE("p-vectors sum to zero and permute with the tuple") {
  Rng rng = make_rng(11);
  for (int k = 0; k < 1000; ++k) {
    const MeasurementTuple t = random_tuple(rng, 3);
    const auto p = derived_p_vectors(t);
    const Vec3 s = p[0] + p[1] + p[2] + p[3];
    CHECK(s.norm() < 1e-15);

    // Swapping measurements 1 and 2 swaps p2 and p3 and keeps p1.
    const MeasurementTuple sw{t.bloch(1), t.bloch(0), t.bloch(2)};
    const auto q = derived_p_vectors(sw);
    CHECK((q[0] - p[0]).norm() < 1e-15);
    CHECK((q[1] - p[2]).norm() < 1e-15);
    CHECK((q[2] - p[1]).norm() < 1e-15);
    CHECK((q[3] - p[3]).norm() < 1e-15);
  }
}

TEST_CASE("validate") {
  CHECK(validate(oracle::kPauli).ok);

  const auto bad = validate(MeasurementTuple{{1.5, 0, 0}});
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.bad_index);
  CHECK(*bad.bad_index == 0);

  const double s = 1.0 / std::sqrt(3.0);
  CHECK(validate(MeasurementTuple{{s, s, s}}).ok);

  const auto nan = validate(MeasurementTuple{{0, 0, 0}, {std::nan(""), 0, 0}});
  CHECK_FALSE(nan.ok);
  CHECK(*nan.bad_index == 1);

  const auto inf = validate(MeasurementTuple{{0, 0, 0}, {0, 0, 0}, {0, INFINITY, 0}});
  CHECK_FALSE(inf.ok);
  CHECK(*inf.bad_index == 2);
}
