#include <gtest/gtest.h>

#include <random>

#include "qlocc/tensor.hpp"

using namespace qlocc;

namespace {

CMatrix random_matrix(std::mt19937& rng, int r, int c) {
  std::normal_distribution<double> g;
  CMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST(Kron, IdentityTimesIdentity) {
  const CMatrix i2 = CMatrix::Identity(2, 2);
  EXPECT_LT(max_abs(kron(i2, i2) - CMatrix::Identity(4, 4)), 1e-15);
}

TEST(Kron, BasisIndexArithmetic) {
  CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
  e0(0) = 1;
  e1(1) = 1;
  const CVector v = kron(e0, e1);
  ASSERT_EQ(v.size(), 4);
  EXPECT_EQ(v(1), Complex(1, 0));
  EXPECT_DOUBLE_EQ(v.norm(), 1.0);
}

TEST(Kron, DiagonalFactors) {
  CMatrix p0 = CMatrix::Zero(4, 4);
  p0(0, 0) = 1;
  const CMatrix k = kron(p0, CMatrix::Identity(4, 4));
  for (int i = 0; i < 16; ++i) EXPECT_EQ(k(i, i), Complex(i < 4 ? 1.0 : 0.0, 0));
  EXPECT_LT(max_abs(k - CMatrix(k.diagonal().asDiagonal())), 1e-15);
}

TEST(Kron, Associative) {
  std::mt19937 rng(7);
  for (int t = 0; t < 20; ++t) {
    const CMatrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 4, 4), c = random_matrix(rng, 2, 2);
    EXPECT_LT(max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))), 1e-12);
  }
}

TEST(Kron, RejectsNonFinite) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = Complex(std::nan(""), 0);
  EXPECT_THROW(kron(a, a), Error);
}

TEST(Svd, ZeroMatrix) {
  const auto s = svd(CMatrix::Zero(3, 3));
  EXPECT_EQ(s.rank, 0);
  EXPECT_EQ(s.nullspace().cols(), 3);
  EXPECT_EQ(s.singular_values.maxCoeff(), 0.0);
}

TEST(Svd, Identity) {
  const auto s = svd(CMatrix::Identity(4, 4));
  EXPECT_EQ(s.rank, 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.singular_values(i), 1.0, 1e-14);
}

TEST(Svd, CoefficientMatrixRankTwo) {
  // |0>|0+1> + |2>|2+3>: two nonzero, linearly independent rows.
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(0, 1) = 1;
  m(2, 2) = m(2, 3) = 1;
  // Gram-Schmidt oracle over the rows.
  std::vector<CVector> kept;
  for (int r = 0; r < 4; ++r) {
    CVector v = m.row(r).transpose();
    for (const auto& q : kept) v -= q.dot(v) * q;
    if (v.norm() > 1e-12) kept.push_back(v / v.norm());
  }
  EXPECT_EQ(kept.size(), 2u);
  EXPECT_EQ(rank(m), 2);
}

TEST(Svd, ReconstructionAndNullspace) {
  std::mt19937 rng(11);
  for (int t = 0; t < 20; ++t) {
    const CMatrix a = random_matrix(rng, 5, 3), b = random_matrix(rng, 3, 7);
    const CMatrix m = a * b;  // rank 3
    const auto s = svd(m);
    EXPECT_EQ(s.rank, 3);
    CMatrix sigma = CMatrix::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) sigma(i, i) = s.singular_values(i);
    EXPECT_LE(max_abs(s.u * sigma * s.v.adjoint() - m), 1e-10 * std::max(1.0, max_abs(m)));
    const CMatrix ns = s.nullspace();
    EXPECT_EQ(ns.cols(), 4);
    EXPECT_LE(max_abs(m * ns), 1e-8 * s.singular_values(0));
    EXPECT_EQ(nullspace(m).cols(), 4);
  }
}

TEST(HermitianEig, Diagonal) {
  RVector d(4);
  d << 0, 1, 1, 1;
  const auto e = hermitian_eig(CMatrix(d.cast<Complex>().asDiagonal()));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.values(i), d(i), 1e-14);
}

TEST(HermitianEig, PauliX) {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto e = hermitian_eig(x);
  EXPECT_NEAR(e.values(0), -1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
}

TEST(HermitianEig, ScalarMatrix) {
  CMatrix p0 = CMatrix::Zero(4, 4), p1 = CMatrix::Zero(4, 4);
  p0(0, 0) = 1;
  p1(1, 1) = p1(2, 2) = p1(3, 3) = 1;
  const auto e = hermitian_eig(CMatrix(0.5 * (p0 + p1)));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.values(i), 0.5, 1e-14);
}

TEST(HermitianEig, RejectsNonHermitian) {
  CMatrix m(2, 2);
  m << 0, 1, 0, 0;
  EXPECT_THROW(hermitian_eig(m), Error);
}

TEST(HermitianEig, RandomReconstruction) {
  std::mt19937 rng(3);
  for (int t = 0; t < 30; ++t) {
    const CMatrix a = random_matrix(rng, 6, 6);
    const CMatrix h = a + a.adjoint();
    const auto e = hermitian_eig(h);
    const CMatrix rec = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LE(max_abs(rec - h), 1e-9 * max_abs(h));
    EXPECT_LE(max_abs(e.vectors.adjoint() * e.vectors - CMatrix::Identity(6, 6)), 1e-10);
    for (int i = 0; i < 6; ++i) {
      EXPECT_LE(max_abs(h * e.vectors.col(i) - e.values(i) * e.vectors.col(i)), 1e-9 * std::max(1.0, max_abs(h)));
    }
  }
}
