#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlocc/tensor.hpp"

namespace qlocc {

// Default pairwise-orthogonality tolerance on |<psi_i|psi_j>|.
inline constexpr double kOrthoTolerance = 1e-9;
inline constexpr double kNormTolerance = 1e-10;

// Ordered parties with local dimensions. A party may additionally be
// factored into sub-systems (e.g. a 6-dim party as 2 x 3); sub-splits only
// matter when tensor factors are discarded.
class PartySpace {
 public:
  PartySpace() = default;
  explicit PartySpace(std::vector<int> dims, std::vector<std::vector<int>> splits = {});

  int parties() const { return static_cast<int>(dims_.size()); }
  int dim(int party) const { return dims_.at(party); }
  const std::vector<int>& dims() const { return dims_; }
  Eigen::Index total_dim() const;

  // Sub-split of a party; empty when the party is not factored.
  const std::vector<int>& split(int party) const { return splits_.at(party); }
  bool has_split(int party) const { return !splits_.at(party).empty(); }
  const std::vector<std::vector<int>>& splits() const { return splits_; }

  // Tensor factors after expanding sub-splits, in order.
  std::vector<int> factor_dims() const;
  // Index range [first, last) of the factors belonging to a party.
  std::pair<int, int> factor_range(int party) const;

  friend bool operator==(const PartySpace&, const PartySpace&) = default;

 private:
  std::vector<int> dims_;
  std::vector<std::vector<int>> splits_;
};

struct Ket {
  PartySpace space;
  CVector amplitudes;
  std::string label;
};

struct StateSet {
  PartySpace space;
  std::vector<Ket> states;
  std::string name;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  const Ket& operator[](std::size_t i) const { return states[i]; }
  std::vector<std::string> labels() const;
  std::optional<std::size_t> find(const std::string& label) const;
};

// Checks shared space, unique labels and normalization.
void validate(const StateSet& s);

struct Bipartition {
  std::vector<int> left;
  std::vector<int> right;
};

void validate(const Bipartition& cut, int parties);
std::string to_string(const Bipartition& cut, const std::vector<std::string>& party_names = {});

struct Term {
  Complex coefficient;
  std::vector<int> indices;  // one basis index per party
};

Eigen::Index flat_index(const std::vector<int>& dims, const std::vector<int>& indices);
std::vector<int> multi_index(const std::vector<int>& dims, Eigen::Index flat);

Ket make_ket(const PartySpace& space, const std::vector<Term>& terms, std::string label);
// Product state from one local vector per party; normalized.
Ket product_ket(const PartySpace& space, const std::vector<CVector>& locals, std::string label);

Complex inner_product(const Ket& a, const Ket& b);

struct GramViolation {
  std::size_t i;
  std::size_t j;
  double magnitude;
};

struct OrthogonalityReport {
  bool pass = true;
  double tolerance = kOrthoTolerance;
  std::vector<GramViolation> violations;  // sorted by magnitude, descending
};

OrthogonalityReport gram_check(const StateSet& s, double tol = kOrthoTolerance);
CMatrix gram_matrix(const StateSet& s);
void require_orthogonal(const StateSet& s, double tol = kOrthoTolerance);

// Amplitudes reshaped to (dim of left parties) x (dim of right parties).
CMatrix coefficient_matrix(const Ket& k, const Bipartition& cut);
int schmidt_rank(const Ket& k, const Bipartition& cut);
bool is_product(const Ket& k);
// Local vectors of a fully product state (one per party), phase fixed so
// the largest entry of each factor except the last is real positive.
std::vector<CVector> product_factors(const Ket& k);

// Tensor-axis permutation: output axis t holds input axis perm[t].
CVector permute_axes(const CVector& amplitudes, const std::vector<int>& dims, const std::vector<int>& perm);

// Merges parties. `groups` lists, per new party, the old-party positions
// after applying `permutation` (identity when empty); groups must be
// contiguous and cover all parties in order.
StateSet merge_parties(const StateSet& s, const std::vector<std::vector<int>>& groups,
                       const std::vector<int>& permutation = {});
// Convenience: two-party view of `s` across the cut (left parties first).
StateSet bipartite_view(const StateSet& s, const Bipartition& cut);

// (I (x) M (x) I) psi with M acting on one party.
CVector apply_local(const CVector& psi, const std::vector<int>& dims, int party, const CMatrix& m);
// sum over the other parties of psi_party psi_party^dagger for pairs:
// returns Psi_b Psi_a^dagger (d_party x d_party) where Psi is the party-by-rest matrix.
CMatrix local_cross(const CVector& a, const CVector& b, const std::vector<int>& dims, int party);
CMatrix reduced_party_state(const Ket& k, int party);

// Partial trace keeping the listed tensor factors (sub-splits expanded).
CMatrix reduced_state(const Ket& k, const std::vector<int>& keep_factors);

struct DiscardRecord {
  std::vector<int> kept_factors;
  std::vector<int> discarded_factors;
  bool orthogonal_after = false;  // every pair has tr(rho_i rho_j) <= tol
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // first violating pair
  std::vector<std::pair<std::size_t, std::size_t>> violations;
};

struct RedundancyReport {
  bool redundant = false;
  std::vector<DiscardRecord> discards;
  std::optional<std::size_t> redundant_discard;  // index into discards when redundant
};

RedundancyReport redundancy_check(const StateSet& s, double tol = kOrthoTolerance);

// Orthonormal basis (d x r) of the span of a party's local supports over
// the whole set. Coordinate columns in ascending order when the support is
// spanned by basis vectors.
struct LocalSupport {
  CMatrix basis;
  bool coordinate_aligned = false;
  std::vector<int> indices;  // filled when coordinate aligned
};

LocalSupport local_support(const StateSet& s, int party);

// The set rewritten in support coordinates on every party. Sub-splits are
// dropped: a restricted support is in general not a product of sub-factors.
struct SupportRestriction {
  StateSet set;
  std::vector<LocalSupport> supports;
};

SupportRestriction restrict_to_local_supports(const StateSet& s);

}  // namespace qlocc
