#include <gtest/gtest.h>

#include "qlocc/fixtures.hpp"
#include "qlocc/upb.hpp"
#include "test_support.hpp"

using namespace qlocc;

namespace {

void expect_valid_extension(const StateSet& s, const Ket& e) {
  EXPECT_TRUE(is_product(e));
  EXPECT_NEAR(e.amplitudes.norm(), 1.0, 1e-10);
  for (const auto& k : s.states) EXPECT_LE(std::abs(inner_product(k, e)), 1e-8) << k.label;
}

}  // namespace

TEST(Upb, TilesUnextendible) {
  const auto v = check_unextendible(build_fixture("tiles33"));
  EXPECT_TRUE(v.unextendible);
  EXPECT_FALSE(v.complete_basis);
  EXPECT_FALSE(v.extension.has_value());
  EXPECT_EQ(v.support_dims, (std::vector<int>{3, 3}));
}

TEST(Upb, TilesWithoutStopperExtendible) {
  auto s = build_fixture("tiles33");
  s.states.pop_back();
  const auto v = check_unextendible(s);
  EXPECT_FALSE(v.unextendible);
  ASSERT_TRUE(v.extension.has_value());
  expect_valid_extension(s, *v.extension);
  // The stopper itself is one such extension.
  const auto stopper = build_fixture("tiles33")[4];
  for (const auto& k : s.states) EXPECT_LE(std::abs(inner_product(k, stopper)), 1e-12);
}

TEST(Upb, CompleteBases) {
  StateSet b;
  b.space = PartySpace({2, 2});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) b.states.push_back(make_ket(b.space, {{1, {i, j}}}, std::to_string(i) + std::to_string(j)));
  const auto v = check_unextendible(b);
  EXPECT_TRUE(v.complete_basis);
  EXPECT_EQ(v.method, "complete-basis");
  EXPECT_TRUE(check_unextendible(build_fixture("s1")).complete_basis);
}

TEST(Upb, RefusesEntangled) {
  EXPECT_THROW(check_unextendible(build_fixture("s5")), Error);
}

TEST(Upb, NumericResiduals) {
  const auto t = build_fixture("tiles33");
  const auto on = numeric_extension_search(t, 50, 7, true);
  EXPECT_GT(on.residual, kExtensionThreshold);
  auto four = t;
  four.states.pop_back();
  const auto found = numeric_extension_search(four, 50, 7, true);
  EXPECT_LE(found.residual, kExtensionThreshold);
  expect_valid_extension(four, found.candidate);
}

TEST(Upb, AgreesWithNumericSearchOnRandomSets) {
  std::mt19937 rng(2024);
  int unext = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = testkit::random_product_set_33(rng, trial);
    const auto v = check_unextendible(s);
    const auto n = numeric_extension_search(s, 100, 11 + static_cast<std::uint64_t>(trial), true);
    EXPECT_EQ(v.unextendible, n.residual > kExtensionThreshold) << s.name << " residual " << n.residual;
    if (v.extension) expect_valid_extension(s, *v.extension);
    unext += v.unextendible;
  }
  EXPECT_GT(unext, 0);
}

TEST(Upb, DeterministicSearch) {
  const auto t = build_fixture("tiles33");
  EXPECT_EQ(numeric_extension_search(t, 10, 3).residual, numeric_extension_search(t, 10, 3).residual);
}
