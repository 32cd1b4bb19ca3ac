#include "qlocc/state.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qlocc {

PartySpace::PartySpace(std::vector<int> dims, std::vector<std::vector<int>> splits)
    : dims_(std::move(dims)), splits_(std::move(splits)) {
  if (dims_.empty()) throw Error(ErrorCode::Dimension, "party space needs at least one party");
  for (int d : dims_) {
    if (d < 1) throw Error(ErrorCode::Dimension, "party dimension must be positive");
  }
  if (splits_.empty()) splits_.resize(dims_.size());
  if (splits_.size() != dims_.size()) throw Error(ErrorCode::Split, "one split entry per party required");
  for (std::size_t p = 0; p < dims_.size(); ++p) {
    auto& f = splits_[p];
    if (f.size() == 1) f.clear();
    if (f.empty()) continue;
    long prod = 1;
    for (int x : f) {
      if (x < 2) throw Error(ErrorCode::Split, "split factors must be at least 2");
      prod *= x;
    }
    if (prod != dims_[p]) {
      throw Error(ErrorCode::Split, "split of party " + std::to_string(p) + " multiplies to " +
                                        std::to_string(prod) + ", expected " + std::to_string(dims_[p]));
    }
  }
  if (total_dim() > kMaxProductDim) throw Error(ErrorCode::TooLarge, "total dimension exceeds 2^20");
}

Eigen::Index PartySpace::total_dim() const {
  Eigen::Index n = 1;
  for (int d : dims_) n *= d;
  return n;
}

std::vector<int> PartySpace::factor_dims() const {
  std::vector<int> out;
  for (std::size_t p = 0; p < dims_.size(); ++p) {
    if (splits_[p].empty()) {
      out.push_back(dims_[p]);
    } else {
      out.insert(out.end(), splits_[p].begin(), splits_[p].end());
    }
  }
  return out;
}

std::pair<int, int> PartySpace::factor_range(int party) const {
  int first = 0;
  for (int p = 0; p < party; ++p) first += splits_.at(p).empty() ? 1 : static_cast<int>(splits_[p].size());
  const int n = splits_.at(party).empty() ? 1 : static_cast<int>(splits_[party].size());
  return {first, first + n};
}

std::vector<std::string> StateSet::labels() const {
  std::vector<std::string> out;
  out.reserve(states.size());
  for (const auto& k : states) out.push_back(k.label);
  return out;
}

std::optional<std::size_t> StateSet::find(const std::string& label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].label == label) return i;
  }
  return std::nullopt;
}

void validate(const StateSet& s) {
  std::set<std::string> seen;
  for (const auto& k : s.states) {
    if (!(k.space == s.space)) throw Error(ErrorCode::Dimension, "state '" + k.label + "' has a different party space");
    if (k.amplitudes.size() != s.space.total_dim()) {
      throw Error(ErrorCode::Dimension, "state '" + k.label + "' has the wrong amplitude count");
    }
    require_finite(k.amplitudes, "state amplitudes");
    if (std::abs(k.amplitudes.norm() - 1.0) > kNormTolerance) {
      throw Error(ErrorCode::InvalidArgument, "state '" + k.label + "' is not normalized");
    }
    if (!seen.insert(k.label).second) throw Error(ErrorCode::DuplicateLabel, "duplicate label '" + k.label + "'");
  }
}

void validate(const Bipartition& cut, int parties) {
  if (cut.left.empty() || cut.right.empty()) throw Error(ErrorCode::InvalidArgument, "bipartition side is empty");
  std::vector<int> all(cut.left);
  all.insert(all.end(), cut.right.begin(), cut.right.end());
  std::sort(all.begin(), all.end());
  std::vector<int> want(parties);
  std::iota(want.begin(), want.end(), 0);
  if (all != want) throw Error(ErrorCode::InvalidArgument, "bipartition does not cover the parties exactly once");
}

std::string to_string(const Bipartition& cut, const std::vector<std::string>& party_names) {
  auto name = [&](int p) {
    if (p < static_cast<int>(party_names.size())) return party_names[p];
    return std::string(1, static_cast<char>('A' + p));
  };
  std::string out;
  for (int p : cut.left) out += name(p);
  out += "|";
  for (int p : cut.right) out += name(p);
  return out;
}

Eigen::Index flat_index(const std::vector<int>& dims, const std::vector<int>& indices) {
  if (indices.size() != dims.size()) throw Error(ErrorCode::Dimension, "index count does not match party count");
  Eigen::Index flat = 0;
  for (std::size_t p = 0; p < dims.size(); ++p) {
    if (indices[p] < 0 || indices[p] >= dims[p]) {
      throw Error(ErrorCode::Dimension, "index " + std::to_string(indices[p]) + " out of range for party " +
                                            std::to_string(p) + " (dim " + std::to_string(dims[p]) + ")");
    }
    flat = flat * dims[p] + indices[p];
  }
  return flat;
}

std::vector<int> multi_index(const std::vector<int>& dims, Eigen::Index flat) {
  std::vector<int> out(dims.size());
  for (std::size_t p = dims.size(); p-- > 0;) {
    out[p] = static_cast<int>(flat % dims[p]);
    flat /= dims[p];
  }
  return out;
}

Ket make_ket(const PartySpace& space, const std::vector<Term>& terms, std::string label) {
  CVector amp = CVector::Zero(space.total_dim());
  for (const auto& t : terms) {
    if (!std::isfinite(t.coefficient.real()) || !std::isfinite(t.coefficient.imag())) {
      throw Error(ErrorCode::NonFinite, "coefficient of state '" + label + "' is not finite");
    }
    amp(flat_index(space.dims(), t.indices)) += t.coefficient;
  }
  const double n = amp.norm();
  if (n <= kNormTolerance) throw Error(ErrorCode::EmptyState, "state '" + label + "' has no nonzero amplitude");
  // Already unit to rounding: keep the bits so canonical text reloads identically.
  if (std::abs(n - 1.0) <= 1e-15) return {space, amp, std::move(label)};
  return {space, amp / n, std::move(label)};
}

Ket product_ket(const PartySpace& space, const std::vector<CVector>& locals, std::string label) {
  if (static_cast<int>(locals.size()) != space.parties()) {
    throw Error(ErrorCode::Dimension, "one local vector per party required");
  }
  CVector amp = CVector::Ones(1);
  for (int p = 0; p < space.parties(); ++p) {
    if (locals[p].size() != space.dim(p)) throw Error(ErrorCode::Dimension, "local vector has the wrong dimension");
    amp = kron(amp, locals[p]);
  }
  const double n = amp.norm();
  if (n <= kNormTolerance) throw Error(ErrorCode::EmptyState, "product state '" + label + "' is zero");
  return {space, amp / n, std::move(label)};
}

Complex inner_product(const Ket& a, const Ket& b) {
  if (!(a.space == b.space) || a.amplitudes.size() != b.amplitudes.size()) {
    throw Error(ErrorCode::Dimension, "inner product of kets on different spaces");
  }
  return a.amplitudes.dot(b.amplitudes);
}

CMatrix gram_matrix(const StateSet& s) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  CMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = inner_product(s.states[i], s.states[j]);
  }
  return g;
}

OrthogonalityReport gram_check(const StateSet& s, double tol) {
  OrthogonalityReport r;
  r.tolerance = tol;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double m = std::abs(inner_product(s.states[i], s.states[j]));
      if (m > tol) r.violations.push_back({i, j, m});
    }
  }
  std::stable_sort(r.violations.begin(), r.violations.end(),
                   [](const GramViolation& a, const GramViolation& b) { return a.magnitude > b.magnitude; });
  r.pass = r.violations.empty();
  return r;
}

void require_orthogonal(const StateSet& s, double tol) {
  const auto r = gram_check(s, tol);
  if (!r.pass) {
    const auto& v = r.violations.front();
    throw Error(ErrorCode::NotOrthogonal, "states '" + s.states[v.i].label + "' and '" + s.states[v.j].label +
                                              "' overlap with magnitude " + std::to_string(v.magnitude));
  }
}

CVector permute_axes(const CVector& amplitudes, const std::vector<int>& dims, const std::vector<int>& perm) {
  const std::size_t n = dims.size();
  if (perm.size() != n) throw Error(ErrorCode::InvalidArgument, "permutation length mismatch");
  std::vector<int> check(perm);
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (check[i] != static_cast<int>(i)) throw Error(ErrorCode::InvalidArgument, "not a permutation");
  }
  std::vector<int> out_dims(n);
  for (std::size_t t = 0; t < n; ++t) out_dims[t] = dims[perm[t]];
  // Stride of each input axis inside the output ordering.
  std::vector<Eigen::Index> out_stride(n);
  Eigen::Index st = 1;
  for (std::size_t t = n; t-- > 0;) {
    out_stride[perm[t]] = st;
    st *= out_dims[t];
  }
  CVector out(amplitudes.size());
  std::vector<int> idx(n, 0);
  for (Eigen::Index flat = 0; flat < amplitudes.size(); ++flat) {
    Eigen::Index target = 0;
    for (std::size_t a = 0; a < n; ++a) target += idx[a] * out_stride[a];
    out(target) = amplitudes(flat);
    for (std::size_t a = n; a-- > 0;) {
      if (++idx[a] < dims[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

CMatrix coefficient_matrix(const Ket& k, const Bipartition& cut) {
  const auto& dims = k.space.dims();
  validate(cut, k.space.parties());
  std::vector<int> perm(cut.left);
  perm.insert(perm.end(), cut.right.begin(), cut.right.end());
  Eigen::Index rows = 1;
  for (int p : cut.left) rows *= dims[p];
  const Eigen::Index cols = k.space.total_dim() / rows;
  const CVector v = permute_axes(k.amplitudes, dims, perm);
  // Row-major reshape of v.
  return Eigen::Map<const CMatrix>(v.data(), cols, rows).transpose();
}

int schmidt_rank(const Ket& k, const Bipartition& cut) {
  return static_cast<int>(rank(coefficient_matrix(k, cut)));
}

bool is_product(const Ket& k) {
  const int n = k.space.parties();
  for (int p = 0; p + 1 < n; ++p) {
    Bipartition cut;
    for (int q = 0; q < n; ++q) (q == p ? cut.left : cut.right).push_back(q);
    if (schmidt_rank(k, cut) != 1) return false;
  }
  return true;
}

std::vector<CVector> product_factors(const Ket& k) {
  if (!is_product(k)) throw Error(ErrorCode::NotProduct, "state '" + k.label + "' is entangled");
  const int n = k.space.parties();
  std::vector<CVector> out;
  CVector prod = CVector::Ones(1);
  for (int p = 0; p < n; ++p) {
    const auto eig = hermitian_eig(reduced_party_state(k, p));
    CVector v = eig.vectors.col(eig.vectors.cols() - 1);
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    v *= std::conj(v(at)) / std::abs(v(at));
    out.push_back(v);
    prod = kron(prod, v);
  }
  out.back() *= prod.dot(k.amplitudes);
  return out;
}

CVector apply_local(const CVector& psi, const std::vector<int>& dims, int party, const CMatrix& m) {
  const int d = dims.at(party);
  if (m.cols() != d) throw Error(ErrorCode::Dimension, "local operator does not match the party dimension");
  Eigen::Index left = 1, right = 1;
  for (int p = 0; p < party; ++p) left *= dims[p];
  for (std::size_t p = party + 1; p < dims.size(); ++p) right *= dims[p];
  if (psi.size() != left * d * right) throw Error(ErrorCode::Dimension, "state length does not match dims");
  const Eigen::Index r = m.rows();
  CVector out(left * r * right);
  const CMatrix mt = m.transpose();
  for (Eigen::Index l = 0; l < left; ++l) {
    // Each slab is a row-major d x right block, i.e. a column-major right x d map.
    Eigen::Map<const CMatrix> in(psi.data() + l * d * right, right, d);
    Eigen::Map<CMatrix> o(out.data() + l * r * right, right, r);
    o.noalias() = in * mt;
  }
  return out;
}

CMatrix local_cross(const CVector& a, const CVector& b, const std::vector<int>& dims, int party) {
  const int d = dims.at(party);
  Eigen::Index left = 1, right = 1;
  for (int p = 0; p < party; ++p) left *= dims[p];
  for (std::size_t p = party + 1; p < dims.size(); ++p) right *= dims[p];
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index l = 0; l < left; ++l) {
    Eigen::Map<const CMatrix> ya(a.data() + l * d * right, right, d);
    Eigen::Map<const CMatrix> yb(b.data() + l * d * right, right, d);
    out.noalias() += yb.transpose() * ya.conjugate();
  }
  return out;
}

CMatrix reduced_party_state(const Ket& k, int party) {
  return local_cross(k.amplitudes, k.amplitudes, k.space.dims(), party);
}

CMatrix reduced_state(const Ket& k, const std::vector<int>& keep_factors) {
  const auto fd = k.space.factor_dims();
  const int n = static_cast<int>(fd.size());
  std::vector<bool> keep(n, false);
  for (int f : keep_factors) {
    if (f < 0 || f >= n) throw Error(ErrorCode::InvalidArgument, "factor index out of range");
    keep[f] = true;
  }
  const auto kept = std::count(keep.begin(), keep.end(), true);
  if (kept == 0) throw Error(ErrorCode::InvalidArgument, "reduced state must keep at least one factor");
  if (kept == n) throw Error(ErrorCode::InvalidArgument, "reduced state must discard at least one factor");
  std::vector<int> perm;
  Eigen::Index dk = 1;
  for (int f = 0; f < n; ++f) {
    if (keep[f]) {
      perm.push_back(f);
      dk *= fd[f];
    }
  }
  for (int f = 0; f < n; ++f) {
    if (!keep[f]) perm.push_back(f);
  }
  const CVector v = permute_axes(k.amplitudes, fd, perm);
  const Eigen::Index dr = v.size() / dk;
  Eigen::Map<const CMatrix> y(v.data(), dr, dk);
  return y.transpose() * y.conjugate();
}

StateSet merge_parties(const StateSet& s, const std::vector<std::vector<int>>& groups,
                       const std::vector<int>& permutation) {
  const int n = s.space.parties();
  std::vector<int> perm = permutation;
  if (perm.empty()) {
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), 0);
  }
  if (static_cast<int>(perm.size()) != n) throw Error(ErrorCode::InvalidArgument, "permutation length mismatch");
  int next = 0;
  std::vector<int> new_dims;
  std::vector<std::vector<int>> new_splits;
  for (const auto& g : groups) {
    if (g.empty()) throw Error(ErrorCode::InvalidArgument, "empty party group");
    int dim = 1;
    for (int pos : g) {
      if (pos != next) throw Error(ErrorCode::InvalidArgument, "party groups must be contiguous and in order");
      ++next;
      dim *= s.space.dim(perm.at(pos));
    }
    new_dims.push_back(dim);
    // A merged party is one system; a lone party keeps its declared split.
    new_splits.push_back(g.size() == 1 ? s.space.split(perm[g[0]]) : std::vector<int>{});
  }
  if (next != n) throw Error(ErrorCode::InvalidArgument, "party groups do not cover every party");
  StateSet out;
  out.space = PartySpace(new_dims, new_splits);
  out.name = s.name;
  for (const auto& k : s.states) {
    out.states.push_back({out.space, permute_axes(k.amplitudes, s.space.dims(), perm), k.label});
  }
  return out;
}

StateSet bipartite_view(const StateSet& s, const Bipartition& cut) {
  validate(cut, s.space.parties());
  std::vector<int> perm(cut.left);
  perm.insert(perm.end(), cut.right.begin(), cut.right.end());
  std::vector<int> g1(cut.left.size()), g2(cut.right.size());
  std::iota(g1.begin(), g1.end(), 0);
  std::iota(g2.begin(), g2.end(), static_cast<int>(cut.left.size()));
  return merge_parties(s, {g1, g2}, perm);
}

RedundancyReport redundancy_check(const StateSet& s, double tol) {
  require_orthogonal(s, tol);
  const auto fd = s.space.factor_dims();
  const int n = static_cast<int>(fd.size());
  // One-dimensional factors carry no information and are never counted as discarded.
  std::vector<int> live;
  for (int f = 0; f < n; ++f) {
    if (fd[f] > 1) live.push_back(f);
  }
  RedundancyReport rep;
  const int m = static_cast<int>(live.size());
  if (m < 2) return rep;
  for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
    DiscardRecord rec;
    std::vector<int> keep;
    for (int f = 0; f < n; ++f) {
      const auto pos = std::find(live.begin(), live.end(), f);
      const bool discarded = pos != live.end() && (mask >> (pos - live.begin())) & 1u;
      (discarded ? rec.discarded_factors : rec.kept_factors).push_back(f);
    }
    std::vector<CMatrix> rho;
    rho.reserve(s.size());
    for (const auto& k : s.states) rho.push_back(reduced_state(k, rec.kept_factors));
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        const double t = std::abs(trace_inner(rho[i], rho[j]));
        if (t > tol) rec.violations.emplace_back(i, j);
      }
    }
    rec.orthogonal_after = rec.violations.empty();
    if (!rec.violations.empty()) rec.witness = rec.violations.front();
    if (rec.orthogonal_after && !rep.redundant) {
      rep.redundant = true;
      rep.redundant_discard = rep.discards.size();
    }
    rep.discards.push_back(std::move(rec));
  }
  return rep;
}

}  // namespace qlocc

namespace qlocc {

LocalSupport local_support(const StateSet& s, int party) {
  const int d = s.space.dim(party);
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& k : s.states) sum += reduced_party_state(k, party);
  LocalSupport out;
  const double scale = std::max(1.0, max_abs(sum));
  std::vector<int> idx;
  for (int i = 0; i < d; ++i) {
    if (std::abs(sum(i, i)) > kRankTolerance * scale) idx.push_back(i);
  }
  const auto eig = hermitian_eig(sum);
  const double top = eig.values.size() ? eig.values.maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = eig.values.size(); i-- > 0;) {
    if (eig.values(i) > kRankTolerance * std::max(top, 1e-300)) keep.push_back(i);
  }
  if (keep.size() == idx.size()) {
    out.coordinate_aligned = true;
    out.indices = idx;
    out.basis = CMatrix::Zero(d, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) out.basis(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
    return out;
  }
  out.basis.resize(d, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.basis.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(keep[c]);
  return out;
}

SupportRestriction restrict_to_local_supports(const StateSet& s) {
  SupportRestriction out;
  std::vector<int> dims = s.space.dims();
  std::vector<CVector> amps;
  for (const auto& k : s.states) amps.push_back(k.amplitudes);
  for (int p = 0; p < s.space.parties(); ++p) {
    out.supports.push_back(local_support(s, p));
    const CMatrix qh = out.supports.back().basis.adjoint();
    for (auto& a : amps) a = apply_local(a, dims, p, qh);
    dims[p] = static_cast<int>(qh.rows());
  }
  out.set.space = PartySpace(dims);
  out.set.name = s.name;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double n = amps[i].norm();
    out.set.states.push_back({out.set.space, amps[i] / n, s.states[i].label});
  }
  return out;
}

}  // namespace qlocc
