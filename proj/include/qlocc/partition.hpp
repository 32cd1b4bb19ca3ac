#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlocc/protocol.hpp"

namespace qlocc {

struct QubitRule {
  bool applicable = false;
  int qubit_party = -1;
  bool distinguishable = false;
  bool non_activable = false;
  std::string reason;
};

// Bipartite sets of product states with a two-dimensional party: always
// distinguishable, and every OPLM image is again such a set, so no
// activation is possible.
QubitRule qubit_times_n_rule(const StateSet& s);

enum class Verdict { Yes, No, Unknown };
std::string_view to_string(Verdict v);

enum class Basis { Exact, InClass };
std::string_view to_string(Basis b);

struct PartitionRecord {
  std::string name;                      // "A|B|C", "A|BC", ...
  std::vector<std::vector<int>> blocks;  // original party indices per block
  std::string method;                    // qubit-rule | search | scripted | dominance
  Verdict distinguishable = Verdict::Unknown;
  Verdict activable = Verdict::Unknown;
  Basis basis = Basis::InClass;
  std::vector<int> first_round_space_dims;  // OPLM space per block at the root
  std::optional<Certificate> certificate;
  std::string note;
};

struct HFlag {
  int k = 1;
  Verdict nonzero = Verdict::Unknown;  // Yes: H_k != 0
  Basis basis = Basis::InClass;
  std::string evidence;
};

struct PartitionProfile {
  std::vector<PartitionRecord> partitions;  // finest first, then bipartitions
  std::vector<HFlag> h_flags;
  bool consistent = true;  // finest activable implies some bipartition activable
  std::vector<std::string> transcript;
};

struct ProfileOptions {
  int max_depth = kDefaultMaxDepth;
  // Scripted protocols tried before search, keyed by partition name.
  std::map<std::string, ProtocolTree> scripted;
};

std::string partition_name(const std::vector<std::vector<int>>& blocks, int parties);

PartitionProfile hidden_nonlocality_profile(const StateSet& s, const ProfileOptions& opt = {});

}  // namespace qlocc
