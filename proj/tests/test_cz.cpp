#include "floerlib/cz.hpp"
#include "floerlib/io.hpp"
#include "floerlib/verify.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace floerlib;

TEST_CASE("normalization and simple paths") {
  REQUIRE(cz_index(symbolic(make_rotation(Rat(2)))).value == Half(4));   // = 2
  REQUIRE(cz_index(symbolic(make_rotation(Rat(1)))).value == Half(2));   // = 1
  REQUIRE(cz_index(symbolic(make_constant(QMat::identity(2)))).value == Half(0));
  QMat b = QMat::identity(2);
  REQUIRE(cz_index(symbolic(make_shear(b, +1))).value == Half(2));       // = 1
  REQUIRE(cz_index(symbolic(make_shear(b, -1))).value == Half(-2));
}

TEST_CASE("orbit index") {
  REQUIRE(orbit_index(symbolic(make_rotation(Rat(2))), 1) == Half(-2));
  REQUIRE(orbit_index(symbolic(make_constant(QMat::identity(6))), 3) == Half(6));
  QMat b = QMat::identity(2);
  REQUIRE(orbit_index(symbolic(make_shear(b, +1)), 2) == Half(2));
  REQUIRE_THROWS_AS(orbit_index(symbolic(make_rotation(Rat(2))), 2),
                    std::invalid_argument);
}

TEST_CASE("lagrangian pair index") {
  QMat z2(2, 2);
  REQUIRE(lagrangian_pair_index(z2, QMat::identity(2)) == Half(2));
  REQUIRE(lagrangian_pair_index(z2, z2) == Half(0));
  QMat i3 = QMat::identity(3);
  auto v = lagrangian_pair_index(i3, i3 * Rat(-1));
  REQUIRE(v == Half(-6));
  REQUIRE(half_abs(v).twice <= 4 * 3);  // |CZ| <= 2n
  QMat asym(2, 2);
  asym(0, 1) = 1;
  REQUIRE_THROWS_AS(lagrangian_pair_index(asym, z2), std::invalid_argument);
}

TEST_CASE("reeb model index") {
  auto w = symbolic(make_constant(QMat::identity(2)));
  REQUIRE(reeb_model_index({0}, {-1}, w) == Half(-4));          // -2
  REQUIRE(reeb_model_index({1, 0}, {-2, -1}, w) == Half(-20));  // -10
  // all a = 0, all d = -1: -2l
  REQUIRE(reeb_model_index({0, 0, 0}, {-1, -1, -1}, w) == Half(-12));
  REQUIRE_THROWS_AS(reeb_model_index({0}, {1}, w), std::invalid_argument);
  REQUIRE_THROWS_AS(reeb_model_index({-1}, {-1}, w), std::invalid_argument);
}

TEST_CASE("fiber vs reeb gap") {
  auto base = symbolic(make_rotation(Rat(1)));
  REQUIRE(fiber_vs_reeb_gap(Rat(0), base) == Half(0));
  REQUIRE(fiber_vs_reeb_gap(Rat(1), base) == Half(1));    // +1/2
  REQUIRE(fiber_vs_reeb_gap(Rat(-1), base) == Half(-1));  // -1/2
}

TEST_CASE("catenation requires matching endpoints") {
  auto a = make_rotation_segment(Rat(0), Rat(1));
  auto b = make_rotation_segment(Rat(1), Rat(3));
  REQUIRE(cz_index(symbolic(make_catenation(a, b))).value ==
          cz_index(symbolic(make_rotation(Rat(3)))).value);
  auto c = make_rotation_segment(Rat(1, 2), Rat(1));
  REQUIRE_THROWS_AS(make_catenation(a, c), std::invalid_argument);
}

TEST_CASE("hamexp guard and value") {
  // exp(J0 S t) with S = I2 is the unit-speed rotation; short time gives 1
  REQUIRE(cz_index(symbolic(make_ham_exp(QMat::identity(2), Rat(1)))).value ==
          Half(2));
  REQUIRE_THROWS_AS(make_ham_exp(QMat::identity(3), Rat(1)),
                    std::invalid_argument);  // odd size
  REQUIRE_THROWS_AS(
      cz_index(symbolic(make_ham_exp(QMat::identity(2), Rat(10)))),
      std::invalid_argument);  // too long to certify
}

TEST_CASE("sampled paths") {
  auto rot = [](long long quarters) {
    static const long long cs[4] = {1, 0, -1, 0};
    QMat m(2, 2);
    long long q = ((quarters % 4) + 4) % 4;
    m(0, 0) = cs[q];
    m(0, 1) = -cs[(q + 3) % 4];
    m(1, 0) = cs[(q + 3) % 4];
    m(1, 1) = cs[q];
    return m;
  };
  SampledPath sp;
  sp.half_dim = 1;
  sp.samples = {{Rat(0), rot(0)}, {Rat(1, 2), rot(1)}, {Rat(1), rot(2)}};
  REQUIRE(cz_index(sampled(sp)).value == Half(2));  // half turn -> 1

  SampledPath full;
  full.half_dim = 1;
  for (long long s = 0; s <= 4; ++s)
    full.samples.emplace_back(Rat(s, 4), rot(s));
  REQUIRE(cz_index(sampled(full)).value == Half(4));  // full turn -> 2

  // non-symplectic sample rejected
  SampledPath bad = sp;
  bad.samples[1].second(0, 1) = 5;
  REQUIRE_THROWS_AS(cz_index(sampled(bad)), std::invalid_argument);

  // adjacent kernel samples cannot be isolated
  SampledPath degen;
  degen.half_dim = 1;
  degen.samples = {{Rat(0), rot(0)}, {Rat(1, 2), rot(0)}, {Rat(1), rot(1)}};
  REQUIRE_THROWS_AS(cz_index(sampled(degen)), DegenerateCrossingError);
}

TEST_CASE("index bounded families") {
  OrbitFamilySpec spec;
  spec.l = 2;
  spec.a = {0, 0};
  spec.c = {Rat(1), Rat(1)};
  spec.n = 3;
  spec.w = [](const std::vector<long long>&) { return Half(0); };
  auto r = index_bounded_check(spec, 10, 4);
  REQUIRE(r.bounded);
  REQUIRE(r.mu.has_value());
  REQUIRE(*r.mu > 0);

  // family pretending every orbit has index 0: lengths unbounded in the
  // window, detected as not index bounded
  auto bad = spec;
  bad.w = [&](const std::vector<long long>& d) {
    long long tw = 0;
    for (auto x : d) tw += 4 * x;
    return Half(2 * 3 - tw);
  };
  REQUIRE_FALSE(index_bounded_check(bad, 3, 4).bounded);

  // window below every attained index: vacuous bound, minimal length reported
  auto r0 = index_bounded_check(spec, 0, 2);
  REQUIRE(r0.bounded);
  REQUIRE(*r0.mu == Rat(2));

  auto broken = spec;
  broken.a = {-1, 0};
  REQUIRE_THROWS_AS(index_bounded_check(broken, 3, 2), std::invalid_argument);
}

TEST_CASE("path file parsing") {
  auto p = parse_path_text("symbolic: (rotation 2)");
  REQUIRE(cz_index(p).value == Half(4));
  auto q = parse_path_text(
      "symbolic: (cat (rotation-seg 0 1) (rotation-seg 1 2))");
  REQUIRE(cz_index(q).value == Half(4));
  auto s = parse_path_text("symbolic: (shear + 2  1 0 0 1)");
  REQUIRE(cz_index(s).value == Half(2));
  auto ds = parse_path_text("symbolic: (sum (rotation 2) (rotation 1))");
  REQUIRE(cz_index(ds).value == Half(6));
  auto sm = parse_path_text(
      "sampled:\n0, 1, 0, 0, 1\n1/2, 0, -1, 1, 0\n1, -1, 0, 0, -1\n");
  REQUIRE(cz_index(sm).value == Half(2));
  REQUIRE_THROWS(parse_path_text("symbolic: (frobnicate 1)"));
  REQUIRE_THROWS(parse_path_text("(rotation 2)"));
}

TEST_CASE("sampled homotopy spot check: a pause does not change the index") {
  auto rot = [](long long quarters) {
    static const long long cs[4] = {1, 0, -1, 0};
    QMat m(2, 2);
    long long q = ((quarters % 4) + 4) % 4;
    m(0, 0) = cs[q];
    m(0, 1) = -cs[(q + 3) % 4];
    m(1, 0) = cs[(q + 3) % 4];
    m(1, 1) = cs[q];
    return m;
  };
  SampledPath direct;
  direct.half_dim = 1;
  direct.samples = {{Rat(0), rot(0)}, {Rat(1, 2), rot(1)}, {Rat(1), rot(2)}};
  SampledPath paused;
  paused.half_dim = 1;
  paused.samples = {{Rat(0), rot(0)},
                    {Rat(1, 4), rot(1)},
                    {Rat(1, 2), rot(1)},
                    {Rat(3, 4), rot(1)},
                    {Rat(1), rot(2)}};
  REQUIRE(cz_index(sampled(direct)).value == cz_index(sampled(paused)).value);
}

TEST_CASE("crossing record sums to the value") {
  auto r = cz_index(symbolic(make_rotation(Rat(4))));
  Half sum(0);
  for (const auto& [t, c] : r.crossings) sum += c;
  REQUIRE(sum == r.value);
  REQUIRE(r.value == Half(8));  // two full turns -> 4
}
