#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlocc/state.hpp"

namespace qlocc {

// Largest number of party assignments the exact test will enumerate.
inline constexpr double kMaxAssignments = 1e7;
inline constexpr double kExtensionThreshold = 1e-8;

struct UpbVerdict {
  bool unextendible = false;
  bool complete_basis = false;     // the set spans its whole restricted space
  std::optional<Ket> extension;    // product state orthogonal to the set, original space
  std::vector<int> support_dims;   // restricted local dimensions
  std::string support_note;
  std::string method;              // complete-basis | bipartite-subsets | assignment-search
  std::uint64_t assignments = 0;   // search nodes visited
};

// Exact test on the local supports. A product extension exists iff the
// states can be assigned to parties so that every party's assigned local
// vectors span a proper subspace. Throws NotProduct on entangled members
// and TooLarge when parties^states exceeds kMaxAssignments.
UpbVerdict check_unextendible(const StateSet& s);

struct ExtensionSearch {
  double residual = 0.0;  // sum_i |<psi_i|candidate>|^2
  Ket candidate;
  int restarts = 0;
};

// Alternating minimization over product states. With `on_supports` the
// search runs inside the states' local supports, matching check_unextendible.
ExtensionSearch numeric_extension_search(const StateSet& s, int restarts, std::uint64_t seed = 1,
                                         bool on_supports = false);

}  // namespace qlocc
