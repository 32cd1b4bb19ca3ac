#include <gtest/gtest.h>

#include <random>

#include "qlocc/fixtures.hpp"
#include "qlocc/qset.hpp"

using namespace qlocc;

namespace {

ParseError parse_error(const std::string& text) {
  try {
    parse_qset(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ParseError(ErrorCode::Syntax, 0, 0, "", "");
}

StateSet random_set(std::mt19937& rng) {
  std::uniform_int_distribution<int> dim(2, 4), parties(2, 3);
  std::normal_distribution<double> g;
  StateSet s;
  std::vector<int> dims(static_cast<std::size_t>(parties(rng)));
  for (int& d : dims) d = dim(rng);
  s.space = PartySpace(dims);
  const int n = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) {
    CVector v(s.space.total_dim());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng() % 3 == 0 ? Complex(g(rng), g(rng)) : Complex(0, 0);
    if (v.norm() == 0) v(0) = 1;
    s.states.push_back({s.space, v.normalized(), "k" + std::to_string(i)});
  }
  return s;
}

}  // namespace

TEST(Qset, ParsesExample) {
  const auto s = parse_qset(
      "qset v1\n"
      "# domino pair\n"
      "dims: 3 3\n"
      "name: demo\n"
      "state a: 1/sqrt(2)*|0,0> - 1/sqrt(2)*|0,1>\n"
      "state b: |0,0> + |0,1>   # unnormalized\n"
      "state c: (0,1)*|2,2>\n"
      "state d: 2/3*|1,1> + 0.5*|1,2>\n");
  EXPECT_EQ(s.name, "demo");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_NEAR(std::abs(s[0].amplitudes(1) + std::sqrt(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(s[1].amplitudes.norm(), 1.0, 1e-15);
  EXPECT_EQ(s[2].amplitudes(8), Complex(0, 1));
  EXPECT_NEAR(s[3].amplitudes(4).real() / s[3].amplitudes(5).real(), 4.0 / 3.0, 1e-14);
}

TEST(Qset, Split) {
  const auto s = parse_qset("qset v1\ndims: 6 6\nsplit: 1 = 2 3\nstate x: |0,5>\n");
  EXPECT_EQ(s.space.split(1), (std::vector<int>{2, 3}));
  EXPECT_FALSE(s.space.has_split(0));
}

TEST(Qset, ErrorsCarryPosition) {
  auto e = parse_error("qset v1\ndims: 2 2\nstate a: |0,2>\n");
  EXPECT_EQ(e.code(), ErrorCode::Dimension);
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 13);
  EXPECT_EQ(e.lexeme(), "2");

  e = parse_error("qset v1\ndims: 2 2\nstate a: 0.5 |0,1>\n");
  EXPECT_EQ(e.code(), ErrorCode::Syntax);
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 14);

  e = parse_error("qset v1\ndims: 2 2\nstate a: |0,0>\nstate a: |1,1>\n");
  EXPECT_EQ(e.code(), ErrorCode::DuplicateLabel);
  EXPECT_EQ(e.line(), 4);
  EXPECT_EQ(e.lexeme(), "a");

  e = parse_error("qset v1\ndims: 6\nsplit: 0 = 2 2\nstate a: |0>\n");
  EXPECT_EQ(e.code(), ErrorCode::Split);
  EXPECT_EQ(e.line(), 3);

  e = parse_error("qset v1\ndims: 2 2\nstate a: |0,0> - |0,0>\n");
  EXPECT_EQ(e.code(), ErrorCode::EmptyState);

  e = parse_error("dims: 2 2\n");
  EXPECT_EQ(e.line(), 1);
  EXPECT_EQ(e.code(), ErrorCode::Syntax);

  e = parse_error("qset v1\ndims: 2 2\nstate a: |0>\n");
  EXPECT_EQ(e.code(), ErrorCode::Dimension);
  EXPECT_EQ(e.column(), 10);

  e = parse_error("qset v1\ndims: 2 2\n");
  EXPECT_EQ(e.code(), ErrorCode::EmptyState);
}

TEST(Qset, FixturesRoundTrip) {
  for (const auto& name : fixture_names()) {
    if (name == "s1_general") continue;
    const auto s = build_fixture(name);
    const auto back = parse_qset(serialize_qset(s));
    EXPECT_EQ(back.space, s.space) << name;
    EXPECT_EQ(back.labels(), s.labels()) << name;
    EXPECT_LE(max_abs(gram_matrix(back) - gram_matrix(s)), 1e-12) << name;
    EXPECT_EQ(serialize_qset(back), serialize_qset(s)) << name;
  }
}

TEST(Qset, RandomRoundTrip) {
  std::mt19937 rng(99);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_set(rng);
    const auto back = parse_qset(serialize_qset(s));
    ASSERT_EQ(back.size(), s.size());
    EXPECT_LE(max_abs(gram_matrix(back) - gram_matrix(s)), 1e-12);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(max_abs(back[i].amplitudes - s[i].amplitudes), 1e-15);
  }
}

TEST(Qset, SerializeIsCanonical) {
  const auto a = parse_qset("qset v1\ndims: 2 2\nstate x: |1,1> + |0,0>\n");
  const auto b = parse_qset("qset v1\ndims: 2 2\nstate x: 2*|0,0> + (2,0)*|1,1>\n");
  EXPECT_EQ(serialize_qset(a), serialize_qset(b));
  EXPECT_EQ(serialize_qset(a).rfind("qset v1\n", 0), 0u);
}
