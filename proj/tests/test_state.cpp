#include <gtest/gtest.h>

#include <random>

#include "qlocc/fixtures.hpp"
#include "qlocc/state.hpp"

using namespace qlocc;

namespace {

CMatrix random_unitary(std::mt19937& rng, int d) {
  std::normal_distribution<double> g;
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(m);
  return qr.householderQ() * CMatrix::Identity(d, d);
}

Ket random_ket(std::mt19937& rng, const PartySpace& sp) {
  std::normal_distribution<double> g;
  CVector v(sp.total_dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(g(rng), g(rng));
  return {sp, v.normalized(), "r"};
}

// Independent partial trace by explicit index loops.
CMatrix partial_trace_oracle(const CVector& psi, const std::vector<int>& dims, const std::vector<int>& keep) {
  std::vector<int> kd;
  for (int f : keep) kd.push_back(dims[f]);
  Eigen::Index dk = 1;
  for (int x : kd) dk *= x;
  CMatrix rho = CMatrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < psi.size(); ++a) {
    for (Eigen::Index b = 0; b < psi.size(); ++b) {
      const auto ia = multi_index(dims, a), ib = multi_index(dims, b);
      bool same = true;
      for (std::size_t f = 0; f < dims.size(); ++f) {
        if (std::find(keep.begin(), keep.end(), static_cast<int>(f)) == keep.end() && ia[f] != ib[f]) same = false;
      }
      if (!same) continue;
      std::vector<int> ka, kb;
      for (int f : keep) {
        ka.push_back(ia[f]);
        kb.push_back(ib[f]);
      }
      rho(flat_index(kd, ka), flat_index(kd, kb)) += psi(a) * std::conj(psi(b));
    }
  }
  return rho;
}

}  // namespace

TEST(MakeKet, DominoState) {
  const PartySpace sp({4, 4});
  const Ket k = make_ket(sp, {{1, {0, 0}}, {1, {0, 1}}}, "0|X01+");
  EXPECT_NEAR(k.amplitudes(0).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(k.amplitudes(1).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(k.amplitudes.norm(), 1.0, 1e-15);
}

TEST(MakeKet, ScaleDiscarded) {
  const Ket k = make_ket(PartySpace({2}), {{5, {0}}}, "e0");
  EXPECT_EQ(k.amplitudes(0), Complex(1, 0));
}

TEST(MakeKet, WStateQuarterAmplitudes) {
  const Ket k = make_ket(PartySpace({4, 4}), {{1, {0, 0}}, {1, {0, 1}}, {1, {2, 2}}, {1, {2, 3}}}, "W");
  for (int i : {0, 1, 10, 11}) EXPECT_NEAR(k.amplitudes(i).real(), 0.5, 1e-15);
}

TEST(MakeKet, Errors) {
  const PartySpace sp({2, 2});
  EXPECT_THROW(make_ket(sp, {{0, {0, 0}}}, "z"), Error);
  EXPECT_THROW(make_ket(sp, {{1, {0, 2}}}, "z"), Error);
  try {
    make_ket(sp, {}, "z");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyState);
  }
}

TEST(InnerProduct, Basics) {
  const PartySpace sp({4, 4});
  const Ket a = make_ket(sp, {{1, {0, 0}}}, "a"), b = make_ket(sp, {{1, {0, 1}}}, "b");
  EXPECT_NEAR(std::abs(inner_product(a, a) - 1.0), 0.0, 1e-15);
  EXPECT_EQ(inner_product(a, b), Complex(0, 0));
  // <2|X23+ , xi23+|1> = <2|xi23+> <X23+|1> = (1/sqrt2) * 0.
  const Ket c = product_ket(sp, {basis_vector(4, 2), local_combo(4, {2, 3})}, "c");
  const Ket d = product_ket(sp, {local_combo(4, {2, 3}), basis_vector(4, 1)}, "d");
  EXPECT_LT(std::abs(inner_product(c, d)), 1e-15);
  EXPECT_THROW(inner_product(a, make_ket(PartySpace({2, 2}), {{1, {0, 0}}}, "x")), Error);
}

TEST(InnerProduct, ConjugateLinearFirst) {
  const PartySpace sp({2});
  Ket a = make_ket(sp, {{Complex(0, 1), {0}}}, "a");
  Ket b = make_ket(sp, {{1, {0}}}, "b");
  EXPECT_NEAR(std::abs(inner_product(a, b) - Complex(0, -1)), 0.0, 1e-15);
}

TEST(GramCheck, DetectsOverlap) {
  StateSet s;
  s.space = PartySpace({4, 4});
  s.states = {make_ket(s.space, {{1, {0, 0}}}, "a"), make_ket(s.space, {{1, {0, 0}}, {1, {0, 1}}}, "b")};
  const auto r = gram_check(s);
  EXPECT_FALSE(r.pass);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_NEAR(r.violations[0].magnitude, 1 / std::sqrt(2.0), 1e-12);
}

TEST(SchmidtRank, Examples) {
  const auto s1 = build_fixture("s1");
  const Bipartition ab{{0}, {1}};
  EXPECT_EQ(schmidt_rank(s1[0], ab), 1);
  const auto s5 = build_fixture("s5");
  EXPECT_EQ(schmidt_rank(s5[0], ab), 2);
  const auto s3 = build_fixture("s3");
  EXPECT_EQ(schmidt_rank(s3[4], ab), 1);
}

TEST(PermuteAxes, MatchesIndexOracle) {
  std::mt19937 rng(5);
  const std::vector<int> dims{2, 3, 4};
  const PartySpace sp(dims);
  const Ket k = random_ket(rng, sp);
  const std::vector<int> perm{2, 0, 1};
  const CVector v = permute_axes(k.amplitudes, dims, perm);
  const std::vector<int> nd{4, 2, 3};
  for (Eigen::Index f = 0; f < k.amplitudes.size(); ++f) {
    const auto idx = multi_index(dims, f);
    EXPECT_EQ(v(flat_index(nd, {idx[2], idx[0], idx[1]})), k.amplitudes(f));
  }
}

TEST(MergeParties, GramPreserved) {
  const auto s2 = build_fixture("s2");
  const auto m = merge_parties(s2, {{0}, {1, 2}});
  EXPECT_EQ(m.space.dims(), (std::vector<int>{4, 4}));
  EXPECT_LE(max_abs(gram_matrix(m) - gram_matrix(s2)), 1e-12);
  const auto bac = merge_parties(s2, {{0}, {1, 2}}, {1, 0, 2});
  EXPECT_EQ(bac.space.dims(), (std::vector<int>{2, 8}));
  EXPECT_LE(max_abs(gram_matrix(bac) - gram_matrix(s2)), 1e-12);
  const auto one = merge_parties(build_fixture("s1"), {{0, 1}});
  EXPECT_EQ(one.space.dims(), (std::vector<int>{16}));
  EXPECT_TRUE(gram_check(one).pass);
  EXPECT_THROW(merge_parties(s2, {{0}, {2}}), Error);
  EXPECT_THROW(merge_parties(s2, {{0, 2}, {1}}), Error);
}

TEST(MergeParties, BipartiteViewMatchesProductStructure) {
  const auto s2 = build_fixture("s2");
  const auto v = bipartite_view(s2, {{1}, {0, 2}});
  EXPECT_EQ(v.space.dims(), (std::vector<int>{2, 8}));
  for (const auto& k : v.states) EXPECT_EQ(schmidt_rank(k, {{0}, {1}}), 1);
}

TEST(ReducedState, Examples) {
  const PartySpace sp({2, 2});
  const Ket k00 = make_ket(sp, {{1, {0, 0}}}, "00");
  const CMatrix r = reduced_state(k00, {0});
  EXPECT_EQ(r(0, 0), Complex(1, 0));
  EXPECT_LT(std::abs(r(1, 1)), 1e-15);
  const Ket bell = make_ket(sp, {{1, {0, 0}}, {1, {1, 1}}}, "bell");
  EXPECT_LE(max_abs(reduced_state(bell, {0}) - 0.5 * CMatrix::Identity(2, 2)), 1e-15);
  EXPECT_THROW(reduced_state(bell, {0, 1}), Error);
  EXPECT_THROW(reduced_state(bell, {}), Error);
}

TEST(ReducedState, MatchesOracleAndIsDensity) {
  std::mt19937 rng(17);
  const PartySpace sp({3, 4}, {{}, {2, 2}});
  const auto fd = sp.factor_dims();
  for (int t = 0; t < 20; ++t) {
    const Ket k = random_ket(rng, sp);
    for (const std::vector<int>& keep : {std::vector<int>{0}, {1}, {2}, {0, 2}, {1, 2}, {0, 1}}) {
      const CMatrix r = reduced_state(k, keep);
      EXPECT_LE(max_abs(r - partial_trace_oracle(k.amplitudes, fd, keep)), 1e-12);
      EXPECT_NEAR(r.trace().real(), 1.0, 1e-10);
      EXPECT_GE(hermitian_eig(r).values.minCoeff(), -1e-10);
    }
  }
}

TEST(Redundancy, ProductPairIsRedundant) {
  StateSet s;
  s.space = PartySpace({2, 2});
  s.states = {make_ket(s.space, {{1, {0, 0}}}, "00"), make_ket(s.space, {{1, {1, 1}}}, "11")};
  const auto r = redundancy_check(s);
  EXPECT_TRUE(r.redundant);
  ASSERT_TRUE(r.redundant_discard.has_value());
}

// Discarding B leaves |0><0| twice, but discarding A leaves X01+ and X01-,
// which stay orthogonal, so the set is redundant through Alice's discard.
TEST(Redundancy, SharedAliceStateRedundantThroughA) {
  StateSet s;
  s.space = PartySpace({4, 4});
  s.states = {make_ket(s.space, {{1, {0, 0}}, {1, {0, 1}}}, "p"), make_ket(s.space, {{1, {0, 0}}, {-1, {0, 1}}}, "m")};
  const auto r = redundancy_check(s);
  EXPECT_TRUE(r.redundant);
  ASSERT_TRUE(r.redundant_discard.has_value());
  EXPECT_EQ(r.discards[*r.redundant_discard].discarded_factors, std::vector<int>{0});
  bool found = false;
  for (const auto& d : r.discards) {
    if (d.discarded_factors == std::vector<int>{1}) {
      found = true;
      EXPECT_FALSE(d.orthogonal_after);
      ASSERT_TRUE(d.witness.has_value());
    }
  }
  EXPECT_TRUE(found);
}

TEST(Redundancy, TraceProductSymmetric) {
  const auto s3 = build_fixture("s3");
  for (std::size_t i = 0; i < s3.size(); ++i) {
    for (std::size_t j = 0; j < s3.size(); ++j) {
      const auto ri = reduced_state(s3[i], {0, 1}), rj = reduced_state(s3[j], {0, 1});
      EXPECT_NEAR(std::abs(trace_inner(ri, rj)), std::abs(trace_inner(rj, ri)), 1e-12);
    }
  }
}

TEST(Properties, LocalUnitaryInvariance) {
  std::mt19937 rng(23);
  const std::vector<std::string> names{"s1", "s2", "s5", "tiles33"};
  for (int t = 0; t < 12; ++t) {
    const auto s = build_fixture(names[t % names.size()]);
    StateSet u = s;
    std::vector<CMatrix> us;
    for (int p = 0; p < s.space.parties(); ++p) us.push_back(random_unitary(rng, s.space.dim(p)));
    for (auto& k : u.states) {
      for (int p = 0; p < s.space.parties(); ++p) k.amplitudes = apply_local(k.amplitudes, s.space.dims(), p, us[p]);
    }
    EXPECT_EQ(gram_check(s).pass, gram_check(u).pass);
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int p = 0; p < s.space.parties(); ++p) {
        Bipartition cut;
        for (int q = 0; q < s.space.parties(); ++q) (q == p ? cut.left : cut.right).push_back(q);
        EXPECT_EQ(schmidt_rank(s[i], cut), schmidt_rank(u[i], cut));
      }
    }
  }
}

TEST(ApplyLocal, MatchesKronEmbedding) {
  std::mt19937 rng(29);
  const std::vector<int> dims{2, 3, 2};
  const Ket k = random_ket(rng, PartySpace(dims));
  for (int p = 0; p < 3; ++p) {
    const CMatrix m = random_unitary(rng, dims[p]);
    CMatrix full = CMatrix::Identity(1, 1);
    for (int q = 0; q < 3; ++q) full = kron(full, q == p ? m : CMatrix(CMatrix::Identity(dims[q], dims[q])));
    EXPECT_LE(max_abs(apply_local(k.amplitudes, dims, p, m) - full * k.amplitudes), 1e-12);
  }
}

TEST(ProductFactors, Reassemble) {
  const auto s4 = build_fixture("s4");
  for (const auto& k : s4.states) {
    const auto f = product_factors(k);
    CVector v = CVector::Ones(1);
    for (const auto& x : f) v = kron(v, x);
    EXPECT_LE(max_abs(v - k.amplitudes), 1e-12);
  }
  EXPECT_THROW(product_factors(build_fixture("s5")[0]), Error);
}

TEST(LocalSupport, CoordinateAndRotated) {
  const auto s3 = build_fixture("s3");
  const auto sup = local_support(s3, 0);
  EXPECT_TRUE(sup.coordinate_aligned);
  EXPECT_EQ(sup.indices.size(), 6u);
  StateSet one;
  one.space = PartySpace({3, 3});
  one.states = {product_ket(one.space, {local_combo(3, {0, 1}), basis_vector(3, 0)}, "a")};
  const auto r = restrict_to_local_supports(one);
  EXPECT_EQ(r.set.space.dims(), (std::vector<int>{1, 1}));
  EXPECT_FALSE(r.supports[0].coordinate_aligned);
}
