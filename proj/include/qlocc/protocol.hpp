#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qlocc/oplm.hpp"
#include "qlocc/upb.hpp"

namespace qlocc {

inline constexpr int kDefaultMaxDepth = 8;
inline constexpr double kPostOrthoTolerance = 1e-8;
// Depth budget for the distinguishability check of sets reached during activation search.
inline constexpr int kReachableDistinguishDepth = 12;

struct ProtocolTree;

struct MeasureNode {
  int party = 0;
  std::vector<CMatrix> kraus;  // on the party's full local space
  std::vector<std::string> labels;
  std::vector<ProtocolTree> children;  // one per outcome
};

struct IdentifiedLeaf {
  std::string label;
};

// A residual set handed on; filled in when the tree is replayed.
struct ReachedLeaf {
  std::optional<StateSet> set;
};

// Outcome that no state of the incoming set can produce.
struct EmptyLeaf {};

struct ProtocolTree {
  std::variant<EmptyLeaf, IdentifiedLeaf, ReachedLeaf, MeasureNode> node;

  bool is_measure() const { return std::holds_alternative<MeasureNode>(node); }
  const MeasureNode& measure() const { return std::get<MeasureNode>(node); }
  MeasureNode& measure() { return std::get<MeasureNode>(node); }
  std::size_t leaf_count() const;
  int depth() const;
};

ProtocolTree measure_node(int party, std::vector<CMatrix> kraus, std::vector<std::string> labels,
                          std::vector<ProtocolTree> children);
ProtocolTree identified(std::string label);
ProtocolTree reached();
ProtocolTree empty_leaf();

struct OutcomeResult {
  StateSet set;
  std::vector<std::size_t> survivors;  // indices into the input set
  std::vector<std::string> eliminated;
};

// Applies one Kraus operator to a party of every state, drops states with
// norm <= 1e-9 and renormalizes. Throws NotOplm when survivors are not
// pairwise orthogonal within 1e-8.
OutcomeResult apply_outcome(const StateSet& s, int party, const CMatrix& kraus);

struct ProtocolVerdict {
  bool pass = false;
  std::string failure;                  // empty on success
  std::string failure_path;             // outcome indices from the root, e.g. "0.2.1"
  std::vector<std::string> transcript;  // one line per visited node
};

// PASS-DISCRIMINATION iff every node is an OPLM for its incoming set and
// every leaf holds at most one state, which an Identified leaf names.
ProtocolVerdict verify_protocol(const StateSet& s, const ProtocolTree& t);

// Measurement onto the pairwise orthogonal local supports of one party,
// ending in Identified leaves; empty when that party cannot resolve the set.
std::optional<ProtocolTree> single_party_resolution(const StateSet& s, int party);

enum class CertificateKind { Distinguishability, Activation, NonActivabilityInClass, Indistinguishability };
std::string_view to_string(CertificateKind k);

struct LeafEvidence {
  std::string path;
  std::string kind;  // identified | empty | irreducible-exact | unextendible
  std::vector<std::string> labels;
  std::string detail;
};

struct Certificate {
  CertificateKind kind = CertificateKind::Distinguishability;
  ProtocolTree tree;
  std::vector<LeafEvidence> leaf_evidence;
  std::string class_note;
  int max_depth = 0;
  bool incomplete = false;  // depth cap reached while moves remained
  std::vector<std::string> transcript;
  // Activation search bookkeeping.
  std::size_t reachable_sets = 0;
  std::size_t reachable_distinguishable = 0;
  std::size_t reachable_undetermined = 0;
  bool probabilistic_activation = false;  // some branch reaches a certified set
};

struct DistinguishingSearch {
  std::optional<Certificate> certificate;
  std::string class_note;
  int max_depth = 0;
  bool incomplete = false;
  std::size_t nodes = 0;
};

DistinguishingSearch search_distinguishing_protocol(const StateSet& s, int max_depth = kDefaultMaxDepth);

// Leaf test used by activation: at least three states, irredundant on the
// local supports, and either IRREDUCIBLE-EXACT there or an unextendible
// product set that is not a complete basis of its supports.
struct LeafCertification {
  bool certified = false;
  std::string kind;
  std::string detail;
};
LeafCertification certify_indistinguishable(const StateSet& s);

Certificate activation_search(const StateSet& s, int max_depth = kDefaultMaxDepth);

// Replays a tree whose every non-empty leaf should be certified
// indistinguishable. Activation certificate on success, else
// NonActivabilityInClass carrying the failing leaf in the transcript.
Certificate certify_activation(const StateSet& s, const ProtocolTree& t);

// Replay with every ReachedLeaf filled with its incoming set.
ProtocolTree replay(const StateSet& s, const ProtocolTree& t);

std::vector<std::string> builtin_protocol_names();
ProtocolTree builtin_protocol(std::string_view name);

// Set signature: labels plus phase-fixed amplitudes rounded to 1e-7.
std::string set_signature(const StateSet& s);

}  // namespace qlocc
