#include <gtest/gtest.h>

#include "qlocc/fixtures.hpp"

using namespace qlocc;

TEST(Fixtures, CountsAndOrthogonality) {
  const std::vector<std::pair<std::string, std::size_t>> want{
      {"s1", 16}, {"s2", 14}, {"s3", 10}, {"s4", 20}, {"s5", 12}, {"s6", 24}, {"tiles33", 5}};
  for (const auto& [name, n] : want) {
    const auto s = build_fixture(name);
    EXPECT_EQ(s.size(), n) << name;
    EXPECT_NO_THROW(validate(s)) << name;
    EXPECT_TRUE(gram_check(s).pass) << name;
  }
}

TEST(Fixtures, S1IsOrthonormalBasis) {
  const auto s = build_fixture("s1");
  EXPECT_LE(max_abs(gram_matrix(s) - CMatrix::Identity(16, 16)), 1e-12);
}

TEST(Fixtures, S1GeneralFourIsS1) {
  const auto a = build_fixture("s1");
  const auto b = build_fixture("s1_general(4)");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].label, b[i].label);
    EXPECT_LE(max_abs(a[i].amplitudes - b[i].amplitudes), 1e-15);
  }
}

TEST(Fixtures, S1GeneralSixAndEight) {
  for (int d : {6, 8}) {
    const auto s = build_fixture("s1_general(" + std::to_string(d) + ")");
    EXPECT_EQ(s.size(), static_cast<std::size_t>(d * d));
    EXPECT_LE(max_abs(gram_matrix(s) - CMatrix::Identity(d * d, d * d)), 1e-12);
  }
  EXPECT_THROW(build_fixture("s1_general(5)"), Error);
  EXPECT_THROW(build_fixture("s7"), Error);
}

TEST(Fixtures, SchmidtStructure) {
  for (const std::string name : {"s1", "s2", "s3", "s4", "tiles33"}) {
    const auto s = build_fixture(name);
    for (const auto& k : s.states) EXPECT_TRUE(is_product(k)) << name << " " << k.label;
  }
  for (const std::string name : {"s5", "s6"}) {
    const auto s = build_fixture(name);
    int entangled = 0;
    for (const auto& k : s.states) entangled += schmidt_rank(k, {{0}, {1}}) == 2;
    EXPECT_GE(entangled, 1) << name;
  }
}

TEST(Fixtures, S4EmbedsS3) {
  const auto s3 = build_fixture("s3");
  const auto s4 = build_fixture("s4");
  EXPECT_EQ(s4.space.dims(), (std::vector<int>{6, 6, 2}));
  for (std::size_t i = 0; i < 10; ++i) {
    for (int c : {0, 1}) {
      CVector e = CVector::Zero(2);
      e(c) = 1;
      EXPECT_LE(max_abs(s4[i + 10 * c].amplitudes - kron(s3[i].amplitudes, e)), 1e-15);
    }
  }
}

TEST(Fixtures, S6VerbatimFails) {
  const auto v = build_fixture("s6", Variant::Verbatim);
  const auto r = gram_check(v);
  EXPECT_FALSE(r.pass);
  const auto xi5 = *v.find("5|0");
  bool plus = false, minus = false;
  for (const auto& g : r.violations) {
    const auto& a = v[g.i].label;
    const auto& b = v[g.j].label;
    if ((a == "xi45+|0" && g.j == xi5) || (b == "xi45+|0" && g.i == xi5)) {
      plus = true;
      EXPECT_NEAR(g.magnitude, 1 / std::sqrt(2.0), 1e-12);
    }
    if ((a == "xi45-|0" && g.j == xi5) || (b == "xi45-|0" && g.i == xi5)) {
      minus = true;
      EXPECT_NEAR(g.magnitude, 1 / std::sqrt(2.0), 1e-12);
    }
  }
  EXPECT_TRUE(plus);
  EXPECT_TRUE(minus);
}

TEST(Fixtures, Corrections) {
  EXPECT_TRUE(fixture_corrections("s3").empty());
  EXPECT_EQ(fixture_corrections("s1").size(), 2u);
  const auto c6 = fixture_corrections("s6");
  bool moved = false;
  for (const auto& c : c6) moved = moved || c.corrected == "|xi45+->_A|1>_B";
  EXPECT_TRUE(moved);
  // s1 subscript corrections leave amplitudes unchanged: both variants identical.
  const auto a = build_fixture("s1", Variant::Corrected), b = build_fixture("s1", Variant::Verbatim);
  EXPECT_LE(max_abs(gram_matrix(a) - gram_matrix(b)), 1e-15);
}

TEST(Fixtures, TilesStopperOverlaps) {
  const auto t = build_fixture("tiles33");
  const auto& st = t[4];
  for (int i = 0; i < 3; ++i) {
    CMatrix r = reduced_party_state(st, 0);
    EXPECT_NEAR(r(i, i).real(), 1.0 / 3.0, 1e-12);
  }
}
