#include "qlocc/oplm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

namespace qlocc {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Party-by-rest matrix of a state: rows are the party's basis index.
CMatrix party_matrix(const CVector& psi, const std::vector<int>& dims, int party) {
  const int d = dims[party];
  Eigen::Index left = 1, right = 1;
  for (int p = 0; p < party; ++p) left *= dims[p];
  for (std::size_t p = party + 1; p < dims.size(); ++p) right *= dims[p];
  CMatrix m(d, left * right);
  for (Eigen::Index l = 0; l < left; ++l)
    for (int x = 0; x < d; ++x)
      for (Eigen::Index r = 0; r < right; ++r) m(x, l * right + r) = psi((l * d + x) * right + r);
  return m;
}

std::string index_label(const std::vector<int>& idx) {
  std::string s = "P[";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i]);
  return s + "]";
}

std::optional<std::vector<int>> diagonal_support(const CMatrix& p) {
  const CMatrix off = p - CMatrix(p.diagonal().asDiagonal());
  if (max_abs(off) > kSpanTolerance) return std::nullopt;
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (p(i, i).real() > 0.5) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

// Indices of the support basis in the local basis, when it is made of
// coordinate vectors.
std::optional<std::vector<int>> support_coordinates(const CMatrix& q) {
  std::vector<int> idx;
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    Eigen::Index at = 0;
    const double m = q.col(c).cwiseAbs().maxCoeff(&at);
    if (std::abs(m - 1.0) > 1e-12) return std::nullopt;
    idx.push_back(static_cast<int>(at));
  }
  return idx;
}

}  // namespace

std::vector<CMatrix> hermitian_coordinate_basis(int d) {
  std::vector<CMatrix> out;
  for (int a = 0; a < d; ++a) {
    CMatrix m = CMatrix::Zero(d, d);
    m(a, a) = 1.0;
    out.push_back(m);
  }
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      CMatrix sym = CMatrix::Zero(d, d), anti = CMatrix::Zero(d, d);
      sym(a, b) = sym(b, a) = kInvSqrt2;
      anti(a, b) = Complex(0, -kInvSqrt2);
      anti(b, a) = Complex(0, kInvSqrt2);
      out.push_back(sym);
      out.push_back(anti);
    }
  }
  return out;
}

RMatrix oplm_constraint_matrix(const StateSet& s, int party, const CMatrix& support) {
  const auto& dims = s.space.dims();
  const int r = static_cast<int>(support.cols());
  const std::size_t n = s.size();
  std::vector<CMatrix> phi;
  phi.reserve(n);
  for (const auto& k : s.states) phi.push_back(support.adjoint() * party_matrix(k.amplitudes, dims, party));
  const Eigen::Index pairs = static_cast<Eigen::Index>(n * (n - 1) / 2);
  RMatrix a = RMatrix::Zero(2 * pairs, static_cast<Eigen::Index>(r) * r);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, row += 2) {
      // <psi_i|E|psi_j> = tr(E C) with C = Phi_j Phi_i^dagger.
      const CMatrix c = phi[j] * phi[i].adjoint();
      Eigen::Index col = 0;
      for (int x = 0; x < r; ++x, ++col) {
        a(row, col) = c(x, x).real();
        a(row + 1, col) = c(x, x).imag();
      }
      for (int x = 0; x < r; ++x) {
        for (int y = x + 1; y < r; ++y) {
          const Complex sym = (c(y, x) + c(x, y)) * kInvSqrt2;
          const Complex anti = (Complex(0, -1) * c(y, x) + Complex(0, 1) * c(x, y)) * kInvSqrt2;
          a(row, col) = sym.real();
          a(row + 1, col) = sym.imag();
          ++col;
          a(row, col) = anti.real();
          a(row + 1, col) = anti.imag();
          ++col;
        }
      }
    }
  }
  return a;
}

namespace {

// Coordinates of a Hermitian matrix in hermitian_coordinate_basis.
RVector hermitian_coordinates(const CMatrix& e) {
  const auto r = e.rows();
  RVector c(r * r);
  Eigen::Index k = 0;
  for (Eigen::Index x = 0; x < r; ++x) c(k++) = e(x, x).real();
  for (Eigen::Index x = 0; x < r; ++x) {
    for (Eigen::Index y = x + 1; y < r; ++y) {
      c(k++) = std::sqrt(2.0) * e(x, y).real();
      c(k++) = -std::sqrt(2.0) * e(x, y).imag();
    }
  }
  return c;
}

}  // namespace

bool OplmSpace::has_coordinates() const {
  const int r = working_dim();
  return coordinates.cols() == static_cast<Eigen::Index>(basis.size()) && coordinates.rows() == r * r;
}

double OplmSpace::span_residual(const CMatrix& e) const {
  const int r = working_dim();
  if (has_coordinates() && e.rows() == r && e.cols() == r &&
      max_abs(CMatrix(e - e.adjoint())) <= kSpanTolerance * 1e-3) {
    const RVector c = hermitian_coordinates(e);
    const RVector rest = c - coordinates * (coordinates.transpose() * c);
    double worst = 0.0;
    Eigen::Index k = 0;
    for (int x = 0; x < r; ++x) worst = std::max(worst, std::abs(rest(k++)));
    for (; k < rest.size(); k += 2) worst = std::max(worst, std::hypot(rest(k), rest(k + 1)) * kInvSqrt2);
    return worst;
  }
  CMatrix rest = e;
  for (const auto& b : basis) rest -= trace_inner(b, e).real() * b;
  return max_abs(rest);
}

double OplmSpace::identity_residual() const {
  return span_residual(CMatrix::Identity(working_dim(), working_dim()));
}

OplmSpace oplm_space(const StateSet& s, int party, SupportMode mode) {
  if (party < 0 || party >= s.space.parties()) throw Error(ErrorCode::InvalidArgument, "party out of range");
  require_orthogonal(s);
  OplmSpace sp;
  sp.party = party;
  sp.dim_party = s.space.dim(party);
  sp.mode = mode;
  sp.support = mode == SupportMode::Full ? CMatrix(CMatrix::Identity(sp.dim_party, sp.dim_party))
                                         : local_support(s, party).basis;
  const int r = sp.working_dim();
  sp.coordinates = s.size() < 2 ? RMatrix(RMatrix::Identity(r * r, r * r))
                                 : nullspace(oplm_constraint_matrix(s, party, sp.support));
  for (Eigen::Index c = 0; c < sp.coordinates.cols(); ++c) {
    const auto v = sp.coordinates.col(c);
    CMatrix e(r, r);
    Eigen::Index k = 0;
    for (int x = 0; x < r; ++x) e(x, x) = v(k++);
    for (int x = 0; x < r; ++x) {
      for (int y = x + 1; y < r; ++y, k += 2) {
        e(x, y) = Complex(v(k), -v(k + 1)) * kInvSqrt2;
        e(y, x) = std::conj(e(x, y));
      }
    }
    sp.basis.push_back(e);
  }
  sp.space_dim = static_cast<int>(sp.basis.size());
  return sp;
}

bool is_trivial(const OplmSpace& sp) { return sp.space_dim == 1; }

BlockStructure block_structure(const OplmSpace& sp) {
  BlockStructure bs;
  for (std::size_t i = 0; i < sp.basis.size(); ++i) {
    for (std::size_t j = i + 1; j < sp.basis.size(); ++j) {
      const CMatrix comm = sp.basis[i] * sp.basis[j] - sp.basis[j] * sp.basis[i];
      if (max_abs(comm) > kCommuteTolerance) return bs;
    }
  }
  bs.commuting = true;
  const int r = sp.working_dim();
  std::vector<CMatrix> blocks{CMatrix::Identity(r, r)};  // isometries
  for (const auto& e : sp.basis) {
    const double tol = kCommuteTolerance * std::max(1.0, max_abs(e));
    std::vector<CMatrix> next;
    for (const auto& b : blocks) {
      if (b.cols() == 1) {
        next.push_back(b);
        continue;
      }
      const auto eig = hermitian_eig(CMatrix(b.adjoint() * e * b));
      Eigen::Index start = 0;
      for (Eigen::Index i = 1; i <= eig.values.size(); ++i) {
        if (i == eig.values.size() || eig.values(i) - eig.values(i - 1) > tol) {
          next.push_back(b * eig.vectors.middleCols(start, i - start));
          start = i;
        }
      }
    }
    blocks = std::move(next);
  }
  for (const auto& b : blocks) {
    const CMatrix p = b * b.adjoint();
    bs.blocks.push_back(p);
    bs.index_supports.push_back(diagonal_support(p));
  }
  // Order blocks by their smallest basis index when diagonal, for stable output.
  std::vector<std::size_t> order(bs.blocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = bs.index_supports[x];
    const auto& c = bs.index_supports[y];
    if (a && c) return a->front() < c->front();
    return a.has_value() && !c.has_value();
  });
  BlockStructure sorted;
  sorted.commuting = true;
  for (auto i : order) {
    sorted.blocks.push_back(bs.blocks[i]);
    sorted.index_supports.push_back(bs.index_supports[i]);
  }
  return sorted;
}

BlockStructure diagonal_block_structure(const OplmSpace& sp) {
  const int r = sp.working_dim();
  const Eigen::Index m = static_cast<Eigen::Index>(sp.basis.size());
  // Coefficients c with every off-diagonal entry of sum_k c_k E_k equal to zero.
  RMatrix a = RMatrix::Zero(std::max(1, r * (r - 1)), m);
  Eigen::Index row = 0;
  for (int x = 0; x < r; ++x) {
    for (int y = x + 1; y < r; ++y, row += 2) {
      for (Eigen::Index k = 0; k < m; ++k) {
        a(row, k) = sp.basis[k](x, y).real();
        a(row + 1, k) = sp.basis[k](x, y).imag();
      }
    }
  }
  const RMatrix ns = nullspace(a);
  std::vector<RVector> diags;
  for (Eigen::Index c = 0; c < ns.cols(); ++c) {
    RVector d = RVector::Zero(r);
    for (Eigen::Index k = 0; k < m; ++k) d += ns(k, c) * sp.basis[k].diagonal().real();
    diags.push_back(d);
  }
  // Index classes: i ~ j when every diagonal element agrees on them.
  std::vector<int> cls(r, -1);
  int count = 0;
  for (int i = 0; i < r; ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = count;
    for (int j = i + 1; j < r; ++j) {
      if (cls[j] >= 0) continue;
      bool same = true;
      for (const auto& d : diags) same = same && std::abs(d(i) - d(j)) <= kSpanTolerance * std::max(1.0, d.cwiseAbs().maxCoeff());
      if (same) cls[j] = count;
    }
    ++count;
  }
  BlockStructure bs;
  bs.commuting = true;
  for (int c = 0; c < count; ++c) {
    CMatrix p = CMatrix::Zero(r, r);
    std::vector<int> idx;
    for (int i = 0; i < r; ++i) {
      if (cls[i] == c) {
        p(i, i) = 1.0;
        idx.push_back(i);
      }
    }
    bs.blocks.push_back(p);
    bs.index_supports.push_back(idx);
  }
  return bs;
}

double completeness_defect(const LocalMeasurement& m) {
  if (m.outcomes.empty()) throw Error(ErrorCode::InvalidArgument, "measurement has no outcomes");
  const auto d = m.outcomes.front().cols();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& k : m.outcomes) sum += k.adjoint() * k;
  return max_abs(sum - CMatrix::Identity(d, d));
}

double orthogonality_defect(const StateSet& s, const LocalMeasurement& m) {
  double worst = 0.0;
  for (const auto& k : m.outcomes) {
    std::vector<CVector> post;
    for (const auto& st : s.states) post.push_back(apply_local(st.amplitudes, s.space.dims(), m.party, k));
    for (std::size_t i = 0; i < post.size(); ++i)
      for (std::size_t j = i + 1; j < post.size(); ++j) worst = std::max(worst, std::abs(post[i].dot(post[j])));
  }
  return worst;
}

bool is_oplm(const StateSet& s, const LocalMeasurement& m, double tol) {
  return completeness_defect(m) <= tol && orthogonality_defect(s, m) <= tol;
}

std::vector<LocalMeasurement> projective_oplms(const OplmSpace& sp, const BlockStructure& bs) {
  if (!bs.commuting) {
    throw Error(ErrorCode::Noncommuting, "OPLM span of party " + std::to_string(sp.party) +
                                             " does not commute; no joint block decomposition exists");
  }
  const int n = static_cast<int>(bs.blocks.size());
  if (n > kMaxBlocks) throw Error(ErrorCode::TooLarge, "more than 20 blocks");
  std::vector<LocalMeasurement> out;
  if (n < 2) return out;
  const auto full_coords = support_coordinates(sp.support);
  const CMatrix id = CMatrix::Identity(sp.dim_party, sp.dim_party);
  const unsigned limit = 1u << (n - 1);
  // Residuals are linear in the mask: reduce the block residuals to an n x n
  // triangular factor and walk the masks in Gray-code order.
  std::optional<RMatrix> t;
  if (sp.has_coordinates()) {
    RMatrix c(sp.coordinates.rows(), n);
    for (int b = 0; b < n; ++b) c.col(b) = hermitian_coordinates(bs.blocks[b]);
    const RMatrix res = c - sp.coordinates * (sp.coordinates.transpose() * c);
    if (res.rows() >= n) {
      Eigen::HouseholderQR<RMatrix> qr(res);
      t = RMatrix(qr.matrixQR().topRows(n).triangularView<Eigen::Upper>());
    } else {
      t = res;
    }
  }
  std::vector<unsigned> order;
  order.reserve(limit);
  if (t) {
    RVector v = RVector::Zero(t->rows());
    unsigned prev = 0;
    for (unsigned i = 1; i < limit; ++i) {
      const unsigned g = i ^ (i >> 1);
      const unsigned flip = g ^ prev;
      const int b = std::countr_zero(flip);
      if (g & flip) v += t->col(b); else v -= t->col(b);
      prev = g;
      if (v.norm() <= kSpanTolerance) order.push_back(g);
    }
    std::sort(order.begin(), order.end());
  } else {
    for (unsigned mask = 1; mask < limit; ++mask) order.push_back(mask);
  }
  for (unsigned mask : order) {
    CMatrix p = CMatrix::Zero(sp.working_dim(), sp.working_dim());
    bool diag = true;
    std::vector<int> idx;
    for (int b = 0; b < n; ++b) {
      if (!((mask >> b) & 1u)) continue;
      p += bs.blocks[b];
      if (bs.index_supports[b] && full_coords) {
        for (int i : *bs.index_supports[b]) idx.push_back((*full_coords)[i]);
      } else {
        diag = false;
      }
    }
    if (!t && sp.span_residual(p) > kSpanTolerance) continue;
    LocalMeasurement m;
    m.party = sp.party;
    const CMatrix pf = sp.support * p * sp.support.adjoint();
    m.outcomes = {pf, id - pf};
    if (diag) {
      std::sort(idx.begin(), idx.end());
      std::vector<int> rest;
      for (int i = 0; i < sp.dim_party; ++i) {
        if (!std::binary_search(idx.begin(), idx.end(), i)) rest.push_back(i);
      }
      m.labels = {index_label(idx), index_label(rest)};
    } else {
      m.labels = {"P_S", "I-P_S"};
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string_view to_string(MeasurementClass c) {
  return c == MeasurementClass::BlockProjective ? "block-projective" : "diagonal-fallback";
}

PartyCandidates candidate_measurements(const StateSet& s, int party) {
  PartyCandidates pc;
  pc.party = party;
  const CMatrix q = local_support(s, party).basis;
  std::set<std::vector<long long>> seen;  // rounded P Q of accepted measurements and their complements
  auto key = [](const CMatrix& m) {
    std::vector<long long> k;
    k.reserve(static_cast<std::size_t>(2 * m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      k.push_back(std::llround(m.data()[i].real() * 1e7));
      k.push_back(std::llround(m.data()[i].imag() * 1e7));
    }
    return k;
  };
  auto add_from = [&](const OplmSpace& sp) {
    if (sp.space_dim <= 1) return;
    BlockStructure bs = block_structure(sp);
    if (!bs.commuting) {
      pc.measurement_class = MeasurementClass::DiagonalFallback;
      bs = diagonal_block_structure(sp);
    }
    for (auto& m : projective_oplms(sp, bs)) {
      const CMatrix pq = m.outcomes[0] * q;
      if (max_abs(pq) <= kSpanTolerance || max_abs(CMatrix(pq - q)) <= kSpanTolerance) continue;
      if (!seen.insert(key(pq)).second) continue;
      seen.insert(key(CMatrix(q - pq)));
      pc.measurements.push_back(std::move(m));
    }
  };
  const OplmSpace restricted = oplm_space(s, party, SupportMode::Restricted);
  pc.space_dim = restricted.space_dim;
  add_from(restricted);
  const OplmSpace full = oplm_space(s, party, SupportMode::Full);
  pc.full_space_dim = full.space_dim;
  add_from(full);
  return pc;
}

std::vector<std::vector<std::string>> eliminable_states(const StateSet& s, const LocalMeasurement& m) {
  if (!is_oplm(s, m)) throw Error(ErrorCode::NotOplm, "measurement is not orthogonality-preserving on the set");
  std::vector<std::vector<std::string>> out;
  for (const auto& k : m.outcomes) {
    std::vector<std::string> gone;
    for (const auto& st : s.states) {
      if (apply_local(st.amplitudes, s.space.dims(), m.party, k).norm() <= kEliminationTolerance) gone.push_back(st.label);
    }
    out.push_back(std::move(gone));
  }
  return out;
}

std::string_view to_string(Irreducibility v) {
  switch (v) {
    case Irreducibility::IrreducibleExact: return "IRREDUCIBLE-EXACT";
    case Irreducibility::IrreducibleInClass: return "IRREDUCIBLE-IN-CLASS";
    case Irreducibility::Reducible: return "REDUCIBLE";
  }
  return "?";
}

IrreducibilityCertificate is_locally_irreducible(const StateSet& s, SupportMode mode) {
  require_orthogonal(s);
  IrreducibilityCertificate cert;
  cert.mode = mode;
  bool all_trivial = true;
  std::vector<OplmSpace> spaces;
  for (int p = 0; p < s.space.parties(); ++p) {
    spaces.push_back(oplm_space(s, p, mode));
    cert.space_dims.push_back(spaces.back().space_dim);
    cert.transcript.push_back("party " + std::to_string(p) + ": space_dim " + std::to_string(spaces.back().space_dim));
    all_trivial = all_trivial && spaces.back().space_dim == 1;
  }
  if (all_trivial) {
    cert.verdict = Irreducibility::IrreducibleExact;
    return cert;
  }
  for (const auto& sp : spaces) {
    if (sp.space_dim <= 1) continue;
    BlockStructure bs = block_structure(sp);
    std::string cls = "block-projective";
    if (!bs.commuting) {
      bs = diagonal_block_structure(sp);
      cls = "diagonal-fallback";
    }
    const auto ms = projective_oplms(sp, bs);
    cert.transcript.push_back("party " + std::to_string(sp.party) + ": " + std::to_string(bs.blocks.size()) +
                              " blocks, " + std::to_string(ms.size()) + " " + cls + " measurements");
    for (const auto& m : ms) {
      const auto elim = eliminable_states(s, m);
      for (const auto& outcome : elim) {
        // An outcome that removes every state never occurs and eliminates nothing.
        if (!outcome.empty() && outcome.size() < s.size()) {
          cert.verdict = Irreducibility::Reducible;
          cert.witness = m;
          cert.witness_eliminations = elim;
          return cert;
        }
      }
    }
  }
  cert.verdict = Irreducibility::IrreducibleInClass;
  return cert;
}

}  // namespace qlocc
