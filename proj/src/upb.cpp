#include "qlocc/upb.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace qlocc {
namespace {

constexpr double kSpanResidual = 1e-8;

// Incrementally grown orthonormal basis of one party's assigned vectors.
struct PartySpan {
  int dim = 0;
  CMatrix basis;  // dim x rank

  // Component of v outside the span, or empty when v already lies in it.
  std::optional<CVector> new_direction(const CVector& v) const {
    CVector r = v;
    if (basis.cols() > 0) r -= basis * (basis.adjoint() * v);
    const double n = r.norm();
    if (n <= kSpanResidual) return std::nullopt;
    return CVector(r / n);
  }
  CVector complement_vector() const {
    if (basis.cols() == 0) {
      CVector e = CVector::Zero(dim);
      e(0) = 1.0;
      return e;
    }
    return nullspace(CMatrix(basis.adjoint())).col(0);
  }
};

struct AssignmentSearch {
  const std::vector<std::vector<CVector>>& vectors;  // [state][active party]
  std::vector<PartySpan> spans;
  std::uint64_t visited = 0;

  bool run(std::size_t i) {
    ++visited;
    if (i == vectors.size()) return true;
    for (std::size_t p = 0; p < spans.size(); ++p) {
      const auto dir = spans[p].new_direction(vectors[i][p]);
      // Free on this party; any other choice is dominated.
      if (!dir) return run(i + 1);
      if (spans[p].basis.cols() + 1 >= spans[p].dim) continue;  // would fill the party
      const CMatrix saved = spans[p].basis;
      spans[p].basis.conservativeResize(Eigen::NoChange, saved.cols() + 1);
      spans[p].basis.col(saved.cols()) = *dir;
      if (run(i + 1)) return true;
      spans[p].basis = saved;
    }
    return false;
  }
};

std::string dims_text(const std::vector<int>& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "x" : "") + std::to_string(d[i]);
  return s;
}

void require_product(const StateSet& s) {
  for (const auto& k : s.states) {
    if (!is_product(k)) throw Error(ErrorCode::NotProduct, "state " + k.label + " is not a product state");
  }
}

}  // namespace

UpbVerdict check_unextendible(const StateSet& s) {
  require_orthogonal(s);
  require_product(s);
  const auto restriction = restrict_to_local_supports(s);
  const StateSet& r = restriction.set;
  UpbVerdict v;
  v.support_dims = r.space.dims();
  v.support_note = "local supports " + dims_text(v.support_dims) + " inside " + dims_text(s.space.dims());

  if (static_cast<Eigen::Index>(r.size()) >= r.space.total_dim()) {
    v.unextendible = true;
    v.complete_basis = true;
    v.method = "complete-basis";
    return v;
  }

  std::vector<int> active;
  for (int p = 0; p < r.space.parties(); ++p) {
    if (r.space.dim(p) > 1) active.push_back(p);
  }
  const double n_assign = std::pow(static_cast<double>(active.size()), static_cast<double>(r.size()));
  if (n_assign > kMaxAssignments) {
    throw Error(ErrorCode::TooLarge, std::to_string(active.size()) + "^" + std::to_string(r.size()) +
                                         " assignments exceed 1e7; use the numeric extension search");
  }
  v.method = active.size() == 2 ? "bipartite-subsets" : "assignment-search";

  std::vector<std::vector<CVector>> vectors;
  for (const auto& k : r.states) {
    const auto f = product_factors(k);
    std::vector<CVector> a;
    for (int p : active) a.push_back(f[p]);
    vectors.push_back(std::move(a));
  }
  AssignmentSearch search{vectors, {}, 0};
  for (int p : active) search.spans.push_back({r.space.dim(p), CMatrix(r.space.dim(p), 0)});
  const bool found = search.run(0);
  v.assignments = search.visited;
  v.unextendible = !found;
  if (found) {
    std::vector<CVector> locals;
    for (int p = 0, a = 0; p < s.space.parties(); ++p) {
      const CMatrix& q = restriction.supports[p].basis;
      if (r.space.dim(p) == 1) {
        locals.push_back(q.col(0));
      } else {
        locals.push_back(q * search.spans[a++].complement_vector());
      }
    }
    v.extension = product_ket(s.space, locals, "extension");
  }
  return v;
}

ExtensionSearch numeric_extension_search(const StateSet& s, int restarts, std::uint64_t seed, bool on_supports) {
  require_product(s);
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be positive");
  std::optional<SupportRestriction> restriction;
  if (on_supports) restriction = restrict_to_local_supports(s);
  const StateSet& w = on_supports ? restriction->set : s;
  const int n = w.space.parties();
  std::vector<std::vector<CVector>> f;
  for (const auto& k : w.states) f.push_back(product_factors(k));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ExtensionSearch best;
  best.residual = std::numeric_limits<double>::infinity();
  best.restarts = restarts;
  std::vector<CVector> best_locals;

  auto overlap2 = [&](std::size_t i, int p, const CVector& a) { return std::norm(f[i][p].dot(a)); };
  for (int t = 0; t < restarts; ++t) {
    std::vector<CVector> a;
    for (int p = 0; p < n; ++p) {
      CVector x(w.space.dim(p));
      for (auto& c : x) c = Complex(g(rng), g(rng));
      a.push_back(x.normalized());
    }
    double residual = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < 500; ++sweep) {
      for (int p = 0; p < n; ++p) {
        const int d = w.space.dim(p);
        CMatrix m = CMatrix::Zero(d, d);
        for (std::size_t i = 0; i < f.size(); ++i) {
          double weight = 1.0;
          for (int q = 0; q < n; ++q) {
            if (q != p) weight *= overlap2(i, q, a[q]);
          }
          m += weight * f[i][p] * f[i][p].adjoint();
        }
        a[p] = hermitian_eig(m).vectors.col(0);
      }
      double now = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        double term = 1.0;
        for (int q = 0; q < n; ++q) term *= overlap2(i, q, a[q]);
        now += term;
      }
      const bool settled = residual - now <= 1e-12 * now;
      residual = now;
      if (settled || residual <= 1e-15) break;
    }
    if (residual < best.residual) {
      best.residual = residual;
      best_locals = a;
    }
  }
  if (on_supports) {
    for (int p = 0; p < n; ++p) best_locals[p] = restriction->supports[p].basis * best_locals[p];
  }
  best.candidate = product_ket(s.space, best_locals, "candidate");
  return best;
}

}  // namespace qlocc
