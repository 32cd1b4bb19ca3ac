#pragma once

// Dense complex linear algebra for small multiparty systems (total dimension
// in the tens). Everything is a thin layer over Eigen dense types so callers
// can pass expressions straight through.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qlocc/error.hpp"

namespace qlocc {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrix = Matrix<Complex>;
using CVector = Vector<Complex>;
using RMatrix = Matrix<double>;
using RVector = Vector<double>;

// Relative cutoff on sigma_max below which a singular value counts as zero.
// Every dimension count in the library derives from this one constant.
inline constexpr double kRankTolerance = 1e-8;
inline constexpr double kHermitianTolerance = 1e-9;
inline constexpr Eigen::Index kMaxProductDim = Eigen::Index{1} << 20;

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

template <typename A, typename B>
using KronResult =
    Eigen::Matrix<typename A::Scalar, Eigen::Dynamic,
                  (A::ColsAtCompileTime == 1 && B::ColsAtCompileTime == 1) ? 1 : Eigen::Dynamic>;

// Kronecker product with the left operand as the slow index.
template <typename A, typename B>
KronResult<A, B> kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  require_finite(a, "left kron operand");
  require_finite(b, "right kron operand");
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxProductDim || cols > kMaxProductDim) {
    throw Error(ErrorCode::TooLarge, "Kronecker product dimension exceeds 2^20");
  }
  KronResult<A, B> out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Scalar>
struct SvdResult {
  using Real = typename Eigen::NumTraits<Scalar>::Real;

  Vector<Real> singular_values;  // descending
  Matrix<Scalar> u;
  Matrix<Scalar> v;
  Eigen::Index rank = 0;

  // Orthonormal basis of the right nullspace (columns).
  Matrix<Scalar> nullspace() const { return v.rightCols(v.cols() - rank); }
  // Orthonormal basis of the column space.
  Matrix<Scalar> range() const { return u.leftCols(rank); }
};

template <typename Real>
Eigen::Index numerical_rank(const Vector<Real>& sigma) {
  if (sigma.size() == 0) return 0;
  const Real top = sigma(0);
  if (top <= Real(0)) return 0;
  const Real cutoff = Real(kRankTolerance) * top;
  Eigen::Index r = 0;
  while (r < sigma.size() && sigma(r) > cutoff) ++r;
  return r;
}

// Full SVD with orthonormal left/right bases. One-sided Jacobi for the small
// systems that dominate; divide-and-conquer once the matrix gets wide.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_finite(m, "svd input");
  const Matrix<Scalar> a = m;
  SvdResult<Scalar> out;
  if (a.size() == 0) {
    out.u = Matrix<Scalar>::Identity(a.rows(), a.rows());
    out.v = Matrix<Scalar>::Identity(a.cols(), a.cols());
    out.singular_values.resize(0);
    return out;
  }
  if (std::max(a.rows(), a.cols()) <= 256) {
    Eigen::JacobiSVD<Matrix<Scalar>> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.singular_values = solver.singularValues();
    out.u = solver.matrixU();
    out.v = solver.matrixV();
  } else {
    Eigen::BDCSVD<Matrix<Scalar>> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::Convergence, "SVD did not converge");
    out.singular_values = solver.singularValues();
    out.u = solver.matrixU();
    out.v = solver.matrixV();
  }
  out.rank = numerical_rank(out.singular_values);
  return out;
}

// Orthonormal basis (columns) of the right nullspace; skips forming U.
template <typename Derived>
Matrix<typename Derived::Scalar> nullspace(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_finite(m, "nullspace input");
  const Matrix<Scalar> a = m;
  if (a.rows() == 0 || a.cols() == 0) return Matrix<Scalar>::Identity(a.cols(), a.cols());
  if (a.cols() <= 256) {
    Eigen::JacobiSVD<Matrix<Scalar>> solver(a, Eigen::ComputeFullV);
    const Eigen::Index r = numerical_rank(Vector<typename Eigen::NumTraits<Scalar>::Real>(solver.singularValues()));
    return solver.matrixV().rightCols(a.cols() - r);
  }
  // Wide systems: thin SVD for the row space, Householder complement for the rest.
  Eigen::BDCSVD<Matrix<Scalar>> solver(a, Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::Convergence, "SVD did not converge");
  const Eigen::Index r = numerical_rank(Vector<typename Eigen::NumTraits<Scalar>::Real>(solver.singularValues()));
  const Eigen::Index n = a.cols();
  if (r == 0) return Matrix<Scalar>::Identity(n, n);
  Eigen::HouseholderQR<Matrix<Scalar>> qr(Matrix<Scalar>(solver.matrixV().leftCols(r)));
  const Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(n, n);
  return q.rightCols(n - r);
}

template <typename Derived>
Eigen::Index rank(const Eigen::MatrixBase<Derived>& m) {
  return svd(m).rank;
}

template <typename Scalar>
struct EigResult {
  RVector values;          // ascending
  Matrix<Scalar> vectors;  // columns, orthonormal
};

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& h) {
  return max_abs(h - h.adjoint());
}

template <typename Derived>
EigResult<typename Derived::Scalar> hermitian_eig(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  require_finite(h, "hermitian_eig input");
  if (h.rows() != h.cols()) throw Error(ErrorCode::InvalidArgument, "hermitian_eig needs a square matrix");
  if (hermiticity_defect(h) > kHermitianTolerance) {
    throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian within 1e-9");
  }
  // Symmetrize so the solver sees an exactly self-adjoint input.
  const Matrix<Scalar> sym = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::Convergence, "eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Orthonormal basis for the span of the given columns.
template <typename Derived>
Matrix<typename Derived::Scalar> orthonormal_span(const Eigen::MatrixBase<Derived>& columns) {
  if (columns.cols() == 0) return Matrix<typename Derived::Scalar>(columns.rows(), 0);
  const auto s = svd(columns);
  return s.range();
}

inline CMatrix projector(const CVector& v) {
  const double n = v.norm();
  const CVector u = v / n;
  return u * u.adjoint();
}

// Frobenius/trace inner product <A, B> = tr(A^dagger B).
template <typename A, typename B>
Complex trace_inner(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a.adjoint() * b).trace();
}

}  // namespace qlocc
