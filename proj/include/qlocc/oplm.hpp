#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlocc/state.hpp"

namespace qlocc {

inline constexpr double kSpanTolerance = 1e-8;
inline constexpr double kCommuteTolerance = 1e-8;
inline constexpr double kEliminationTolerance = 1e-9;
inline constexpr int kMaxBlocks = 20;

// Full: operators on the whole local space. Restricted: operators on the
// span of the set's local supports, in the coordinates of `support`.
enum class SupportMode { Full, Restricted };

struct OplmSpace {
  int party = 0;
  int dim_party = 0;
  SupportMode mode = SupportMode::Full;
  CMatrix support;             // dim_party x r isometry (identity in Full mode)
  std::vector<CMatrix> basis;  // r x r Hermitian, trace-orthonormal
  RMatrix coordinates;         // r^2 x space_dim, basis in Hermitian coordinates (may be empty)
  int space_dim = 0;

  int working_dim() const { return static_cast<int>(support.cols()); }
  bool has_coordinates() const;
  double identity_residual() const;
  // Distance of a working-coordinate Hermitian matrix from the span.
  double span_residual(const CMatrix& e) const;
};

// Real-linear system whose nullspace is the OPLM space: one row pair per
// state pair (real and imaginary parts), one column per Hermitian coordinate.
RMatrix oplm_constraint_matrix(const StateSet& s, int party, const CMatrix& support);
// Hermitian coordinate basis: diagonals, then (a,b) symmetric and antisymmetric pairs.
std::vector<CMatrix> hermitian_coordinate_basis(int d);

OplmSpace oplm_space(const StateSet& s, int party, SupportMode mode = SupportMode::Full);
bool is_trivial(const OplmSpace& sp);

struct BlockStructure {
  bool commuting = false;
  std::vector<CMatrix> blocks;                         // projectors, working coordinates
  std::vector<std::optional<std::vector<int>>> index_supports;  // when a block is diagonal in the local basis
};

BlockStructure block_structure(const OplmSpace& sp);

// The subspace of diagonal elements of the span, its index classes as
// blocks. Used when the span does not commute.
BlockStructure diagonal_block_structure(const OplmSpace& sp);

struct LocalMeasurement {
  int party = 0;
  std::vector<CMatrix> outcomes;  // Kraus operators on the full local space
  std::vector<std::string> labels;
};

double completeness_defect(const LocalMeasurement& m);
// Largest post-measurement overlap |<psi_i|M_k^dag M_k|psi_j>| over k and i != j.
double orthogonality_defect(const StateSet& s, const LocalMeasurement& m);
bool is_oplm(const StateSet& s, const LocalMeasurement& m, double tol = kSpanTolerance);

// Two-outcome block-projective measurements {P_S, I - P_S} with P_S in the
// span, deduplicated under complementation. Throws Noncommuting when
// bs.commuting is false.
std::vector<LocalMeasurement> projective_oplms(const OplmSpace& sp, const BlockStructure& bs);

enum class MeasurementClass { BlockProjective, DiagonalFallback };
std::string_view to_string(MeasurementClass c);

struct PartyCandidates {
  int party = 0;
  int space_dim = 0;       // restricted to the local support
  int full_space_dim = 0;  // on the whole local space
  MeasurementClass measurement_class = MeasurementClass::BlockProjective;
  std::vector<LocalMeasurement> measurements;
};

// Search-class measurements for one party: block-projective measurements
// of the span on the local support and of the span on the whole local
// space (diagonal fallback for a span that does not commute). Measurements
// that act trivially on the support, or duplicate another's action on the
// support, are dropped.
PartyCandidates candidate_measurements(const StateSet& s, int party);

std::vector<std::vector<std::string>> eliminable_states(const StateSet& s, const LocalMeasurement& m);

enum class Irreducibility { IrreducibleExact, IrreducibleInClass, Reducible };
std::string_view to_string(Irreducibility v);

struct IrreducibilityCertificate {
  Irreducibility verdict = Irreducibility::IrreducibleExact;
  std::vector<int> space_dims;  // per party
  std::vector<std::string> transcript;
  std::optional<LocalMeasurement> witness;
  std::vector<std::vector<std::string>> witness_eliminations;
  SupportMode mode = SupportMode::Full;
};

IrreducibilityCertificate is_locally_irreducible(const StateSet& s, SupportMode mode = SupportMode::Full);

}  // namespace qlocc
