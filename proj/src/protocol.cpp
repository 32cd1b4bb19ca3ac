#include "qlocc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "qlocc/fixtures.hpp"

namespace qlocc {

std::size_t ProtocolTree::leaf_count() const {
  if (!is_measure()) return 1;
  std::size_t n = 0;
  for (const auto& c : measure().children) n += c.leaf_count();
  return n;
}

int ProtocolTree::depth() const {
  if (!is_measure()) return 0;
  int d = 0;
  for (const auto& c : measure().children) d = std::max(d, c.depth());
  return d + 1;
}

ProtocolTree measure_node(int party, std::vector<CMatrix> kraus, std::vector<std::string> labels,
                          std::vector<ProtocolTree> children) {
  MeasureNode m;
  m.party = party;
  m.kraus = std::move(kraus);
  m.labels = std::move(labels);
  m.children = std::move(children);
  return {std::move(m)};
}

ProtocolTree identified(std::string label) { return {IdentifiedLeaf{std::move(label)}}; }
ProtocolTree reached() { return {ReachedLeaf{}}; }
ProtocolTree empty_leaf() { return {EmptyLeaf{}}; }

OutcomeResult apply_outcome(const StateSet& s, int party, const CMatrix& kraus) {
  if (party < 0 || party >= s.space.parties()) throw Error(ErrorCode::InvalidArgument, "party out of range");
  const int d = s.space.dim(party);
  if (kraus.rows() != d || kraus.cols() != d) {
    throw Error(ErrorCode::Dimension, "Kraus operator is " + std::to_string(kraus.rows()) + "x" +
                                          std::to_string(kraus.cols()) + ", party dimension is " + std::to_string(d));
  }
  OutcomeResult r;
  r.set.space = s.space;
  r.set.name = s.name;
  for (std::size_t i = 0; i < s.size(); ++i) {
    CVector v = apply_local(s[i].amplitudes, s.space.dims(), party, kraus);
    const double n = v.norm();
    if (n <= kEliminationTolerance) {
      r.eliminated.push_back(s[i].label);
      continue;
    }
    r.set.states.push_back({s.space, v / n, s[i].label});
    r.survivors.push_back(i);
  }
  const auto report = gram_check(r.set, kPostOrthoTolerance);
  if (!report.pass) {
    const auto& g = report.violations.front();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", g.magnitude);
    throw Error(ErrorCode::NotOplm, "outcome breaks orthogonality of " + r.set[g.i].label + " and " +
                                        r.set[g.j].label + " (overlap " + buf + ")");
  }
  return r;
}

namespace {

constexpr double kCompletenessTolerance = 1e-10;

std::string child_path(const std::string& path, std::size_t k) {
  return path.empty() ? std::to_string(k) : path + "." + std::to_string(k);
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

void check_node(const StateSet& s, const MeasureNode& m) {
  if (m.party < 0 || m.party >= s.space.parties()) {
    throw Error(ErrorCode::MalformedTree, "measure node names party " + std::to_string(m.party));
  }
  if (m.kraus.empty()) throw Error(ErrorCode::MalformedTree, "measure node has no outcomes");
  if (m.children.size() != m.kraus.size()) {
    throw Error(ErrorCode::MalformedTree, "measure node has " + std::to_string(m.kraus.size()) + " outcomes but " +
                                              std::to_string(m.children.size()) + " children");
  }
  const int d = s.space.dim(m.party);
  for (const auto& k : m.kraus) {
    if (k.rows() != d || k.cols() != d) throw Error(ErrorCode::MalformedTree, "Kraus operator has the wrong size");
  }
}

double completeness(const MeasureNode& m) {
  LocalMeasurement lm;
  lm.party = m.party;
  lm.outcomes = m.kraus;
  return completeness_defect(lm);
}

bool verify_rec(const StateSet& s, const ProtocolTree& t, const std::string& path, ProtocolVerdict& v,
                std::set<std::string>& identified_labels) {
  auto fail = [&](std::string why) {
    v.failure = std::move(why);
    v.failure_path = path.empty() ? "root" : path;
    return false;
  };
  const std::string where = path.empty() ? "root" : path;
  if (const auto* e = std::get_if<EmptyLeaf>(&t.node)) {
    (void)e;
    if (!s.empty()) return fail("outcome marked empty is reached by " + join(s.labels()));
    v.transcript.push_back(where + ": empty");
    return true;
  }
  if (const auto* id = std::get_if<IdentifiedLeaf>(&t.node)) {
    if (s.size() > 1) return fail("leaf holds " + std::to_string(s.size()) + " states: " + join(s.labels()));
    if (s.size() == 1 && s[0].label != id->label) return fail("leaf names " + id->label + " but holds " + s[0].label);
    if (s.size() == 1) identified_labels.insert(id->label);
    v.transcript.push_back(where + ": identified " + (s.empty() ? std::string("(never reached)") : id->label));
    return true;
  }
  if (std::holds_alternative<ReachedLeaf>(t.node)) {
    if (s.size() > 1) return fail("leaf holds " + std::to_string(s.size()) + " states: " + join(s.labels()));
    if (s.size() == 1) identified_labels.insert(s[0].label);
    v.transcript.push_back(where + ": " + (s.empty() ? std::string("empty") : "identified " + s[0].label));
    return true;
  }
  const auto& m = t.measure();
  check_node(s, m);
  const double defect = completeness(m);
  if (defect > kCompletenessTolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", defect);
    return fail(std::string("Kraus operators are not complete (defect ") + buf + ")");
  }
  v.transcript.push_back(where + ": party " + std::to_string(m.party) + " measures, " + std::to_string(m.kraus.size()) +
                         " outcomes on " + std::to_string(s.size()) + " states");
  for (std::size_t k = 0; k < m.kraus.size(); ++k) {
    OutcomeResult r;
    try {
      r = apply_outcome(s, m.party, m.kraus[k]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotOplm) throw;
      v.failure_path = child_path(path, k);
      v.failure = e.what();
      return false;
    }
    if (!verify_rec(r.set, m.children[k], child_path(path, k), v, identified_labels)) return false;
  }
  return true;
}

}  // namespace

ProtocolVerdict verify_protocol(const StateSet& s, const ProtocolTree& t) {
  require_orthogonal(s);
  ProtocolVerdict v;
  std::set<std::string> found;
  v.pass = verify_rec(s, t, "", v, found);
  if (v.pass) {
    for (const auto& k : s.states) {
      if (!found.count(k.label)) {
        v.pass = false;
        v.failure = "state " + k.label + " reaches no identified leaf";
        v.failure_path = "root";
        break;
      }
    }
  }
  v.transcript.push_back(v.pass ? "PASS-DISCRIMINATION" : "FAIL at " + v.failure_path + ": " + v.failure);
  return v;
}

std::optional<ProtocolTree> single_party_resolution(const StateSet& s, int party) {
  if (s.size() < 2) return std::nullopt;
  const int d = s.space.dim(party);
  std::vector<CMatrix> proj;
  for (const auto& k : s.states) {
    const auto eig = hermitian_eig(reduced_party_state(k, party));
    const double top = eig.values.maxCoeff();
    CMatrix p = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (eig.values(i) > kRankTolerance * top) p += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
    for (const auto& q : proj) {
      if (max_abs(CMatrix(p * q)) > kPostOrthoTolerance) return std::nullopt;
    }
    proj.push_back(p);
  }
  CMatrix rest = CMatrix::Identity(d, d);
  std::vector<std::string> labels;
  std::vector<ProtocolTree> children;
  for (std::size_t i = 0; i < s.size(); ++i) {
    rest -= proj[i];
    labels.push_back("P_" + s[i].label);
    children.push_back(identified(s[i].label));
  }
  if (max_abs(rest) > 1e-10) {
    proj.push_back(rest);
    labels.push_back("rest");
    children.push_back(empty_leaf());
  }
  return measure_node(party, std::move(proj), std::move(labels), std::move(children));
}

std::string_view to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::Distinguishability: return "Distinguishability";
    case CertificateKind::Activation: return "Activation";
    case CertificateKind::NonActivabilityInClass: return "NonActivabilityInClass";
    case CertificateKind::Indistinguishability: return "Indistinguishability";
  }
  return "?";
}

std::string set_signature(const StateSet& s) {
  std::string sig;
  for (int d : s.space.dims()) sig += std::to_string(d) + "x";
  for (const auto& k : s.states) {
    sig += "|" + k.label + ":";
    Eigen::Index at = 0;
    k.amplitudes.cwiseAbs().maxCoeff(&at);
    const Complex phase = std::conj(k.amplitudes(at)) / std::abs(k.amplitudes(at));
    for (Eigen::Index i = 0; i < k.amplitudes.size(); ++i) {
      const Complex a = k.amplitudes(i) * phase;
      const long re = std::lround(a.real() * 1e7);
      const long im = std::lround(a.imag() * 1e7);
      if (re == 0 && im == 0) continue;
      sig += std::to_string(i) + "," + std::to_string(re) + "," + std::to_string(im) + ";";
    }
  }
  return sig;
}

namespace {

std::string class_note() {
  return "block-projective OPLMs on the local supports (diagonal sub-span when the span does not commute) "
         "plus terminal single-party resolution";
}

// Shared per-run caches keyed by set signature.
class Engine {
 public:
  const std::vector<PartyCandidates>& candidates(const StateSet& s, const std::string& sig) {
    auto it = candidates_.find(sig);
    if (it != candidates_.end()) return it->second;
    std::vector<PartyCandidates> all;
    for (int p = 0; p < s.space.parties(); ++p) all.push_back(candidate_measurements(s, p));
    return candidates_.emplace(sig, std::move(all)).first->second;
  }

  bool has_moves(const StateSet& s, const std::string& sig) {
    for (const auto& pc : candidates(s, sig)) {
      if (!pc.measurements.empty()) return true;
    }
    return false;
  }

  std::vector<OutcomeResult> outcomes(const StateSet& s, const LocalMeasurement& m) {
    std::vector<OutcomeResult> out;
    for (const auto& k : m.outcomes) out.push_back(apply_outcome(s, m.party, k));
    return out;
  }

  // Distinguishing search ---------------------------------------------------
  std::optional<ProtocolTree> distinguish(const StateSet& s, int depth) {
    ++nodes_;
    if (s.empty()) return empty_leaf();
    if (s.size() == 1) return identified(s[0].label);
    for (int p = 0; p < s.space.parties(); ++p) {
      if (auto t = single_party_resolution(s, p)) return t;
    }
    const std::string sig = set_signature(s);
    if (auto it = dist_ok_.find(sig); it != dist_ok_.end()) return it->second;
    if (auto it = dist_fail_.find(sig); it != dist_fail_.end() && it->second.first >= depth) {
      dist_cap_hit_ = dist_cap_hit_ || it->second.second;
      return std::nullopt;
    }
    if (depth == 0) {
      const bool moves = has_moves(s, sig);
      dist_cap_hit_ = dist_cap_hit_ || moves;
      dist_fail_[sig] = {0, moves};
      return std::nullopt;
    }
    const bool outer_cap = dist_cap_hit_;
    dist_cap_hit_ = false;
    for (const auto& pc : candidates(s, sig)) {
      for (const auto& m : pc.measurements) {
        const auto outs = outcomes(s, m);
        std::vector<ProtocolTree> children;
        bool ok = true;
        for (const auto& r : outs) {
          auto sub = distinguish(r.set, depth - 1);
          if (!sub) {
            ok = false;
            break;
          }
          children.push_back(std::move(*sub));
        }
        if (ok) {
          dist_cap_hit_ = outer_cap;
          ProtocolTree t = measure_node(m.party, m.outcomes, m.labels, std::move(children));
          dist_ok_.emplace(sig, t);
          return t;
        }
      }
    }
    dist_fail_[sig] = {depth, dist_cap_hit_};
    dist_cap_hit_ = outer_cap || dist_cap_hit_;
    return std::nullopt;
  }

  bool dist_cap_hit() const { return dist_cap_hit_; }
  void reset_dist_cap() { dist_cap_hit_ = false; }
  std::size_t nodes() const { return nodes_; }

  // Activation search --------------------------------------------------------
  const LeafCertification& certification(const StateSet& s, const std::string& sig) {
    auto it = certified_.find(sig);
    if (it != certified_.end()) return it->second;
    return certified_.emplace(sig, certify_indistinguishable(s)).first->second;
  }

  std::optional<ProtocolTree> activate(const StateSet& s, int depth) {
    ++nodes_;
    if (s.size() <= 2) return std::nullopt;
    const std::string sig = set_signature(s);
    if (auto it = act_fail_.find(sig); it != act_fail_.end() && it->second.first >= depth) {
      act_cap_hit_ = act_cap_hit_ || it->second.second;
      return std::nullopt;
    }
    if (depth == 0) {
      const bool moves = has_moves(s, sig);
      act_cap_hit_ = act_cap_hit_ || moves;
      act_fail_[sig] = {0, moves};
      return std::nullopt;
    }
    const bool outer_cap = act_cap_hit_;
    act_cap_hit_ = false;
    for (const auto& pc : candidates(s, sig)) {
      for (const auto& m : pc.measurements) {
        const auto outs = outcomes(s, m);
        std::vector<ProtocolTree> children;
        bool ok = true;
        for (const auto& r : outs) {
          if (r.set.empty()) {
            children.push_back(empty_leaf());
            continue;
          }
          if (certification(r.set, set_signature(r.set)).certified) {
            children.push_back(reached());
            continue;
          }
          auto sub = activate(r.set, depth - 1);
          if (!sub) {
            ok = false;
            break;
          }
          children.push_back(std::move(*sub));
        }
        if (ok) {
          act_cap_hit_ = outer_cap;
          return measure_node(m.party, m.outcomes, m.labels, std::move(children));
        }
      }
    }
    act_fail_[sig] = {depth, act_cap_hit_};
    act_cap_hit_ = outer_cap || act_cap_hit_;
    return std::nullopt;
  }

  bool act_cap_hit() const { return act_cap_hit_; }
  void reset_act_cap() { act_cap_hit_ = false; }

 private:
  std::unordered_map<std::string, std::vector<PartyCandidates>> candidates_;
  std::unordered_map<std::string, ProtocolTree> dist_ok_;
  std::unordered_map<std::string, std::pair<int, bool>> dist_fail_;
  std::unordered_map<std::string, LeafCertification> certified_;
  std::unordered_map<std::string, std::pair<int, bool>> act_fail_;
  bool dist_cap_hit_ = false;
  bool act_cap_hit_ = false;
  std::size_t nodes_ = 0;
};

void collect_evidence(const StateSet& s, const ProtocolTree& t, const std::string& path, Certificate& c,
                      bool activation, bool& all_ok) {
  const std::string where = path.empty() ? "root" : path;
  if (std::holds_alternative<EmptyLeaf>(t.node) || (!t.is_measure() && s.empty())) {
    c.leaf_evidence.push_back({where, "empty", {}, "no state reaches this outcome"});
    if (!s.empty()) all_ok = false;
    return;
  }
  if (!t.is_measure()) {
    if (!activation) {
      const bool one = s.size() == 1;
      all_ok = all_ok && one;
      c.leaf_evidence.push_back({where, one ? "identified" : "unresolved", s.labels(), ""});
      return;
    }
    const auto cert = certify_indistinguishable(s);
    all_ok = all_ok && cert.certified;
    c.leaf_evidence.push_back({where, cert.certified ? cert.kind : "uncertified", s.labels(), cert.detail});
    return;
  }
  const auto& m = t.measure();
  check_node(s, m);
  for (std::size_t k = 0; k < m.kraus.size(); ++k) {
    const auto r = apply_outcome(s, m.party, m.kraus[k]);
    collect_evidence(r.set, m.children[k], child_path(path, k), c, activation, all_ok);
  }
}

}  // namespace

DistinguishingSearch search_distinguishing_protocol(const StateSet& s, int max_depth) {
  if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be at least 1");
  require_orthogonal(s);
  Engine engine;
  DistinguishingSearch out;
  out.class_note = class_note();
  out.max_depth = max_depth;
  auto tree = engine.distinguish(s, max_depth);
  out.nodes = engine.nodes();
  if (!tree) {
    out.incomplete = engine.dist_cap_hit();
    return out;
  }
  Certificate c;
  c.kind = CertificateKind::Distinguishability;
  c.tree = std::move(*tree);
  c.class_note = out.class_note;
  c.max_depth = max_depth;
  const auto v = verify_protocol(s, c.tree);
  if (!v.pass) throw Error(ErrorCode::MalformedTree, "search produced a tree that fails replay: " + v.failure);
  c.transcript = v.transcript;
  bool ok = true;
  collect_evidence(s, c.tree, "", c, false, ok);
  out.certificate = std::move(c);
  return out;
}

LeafCertification certify_indistinguishable(const StateSet& s) {
  LeafCertification out;
  if (s.size() < 3) {
    out.detail = "two or fewer orthogonal states are always distinguishable";
    return out;
  }
  const auto restriction = restrict_to_local_supports(s);
  const StateSet& r = restriction.set;
  std::string dims;
  for (int d : r.space.dims()) dims += (dims.empty() ? "" : "x") + std::to_string(d);
  const auto red = redundancy_check(r);
  if (red.redundant) {
    out.detail = "locally redundant on supports " + dims;
    return out;
  }
  // IRREDUCIBLE-EXACT means every OPLM space is trivial; no need to enumerate measurements.
  bool all_trivial = true;
  for (int p = 0; p < r.space.parties() && all_trivial; ++p) all_trivial = is_trivial(oplm_space(r, p));
  if (all_trivial) {
    out.certified = true;
    out.kind = "irreducible-exact";
    out.detail = "every OPLM space is trivial on supports " + dims;
    return out;
  }
  bool product = true;
  for (const auto& k : s.states) product = product && is_product(k);
  if (!product) {
    out.detail = "reducible or irreducible only in class, and not a product set";
    return out;
  }
  try {
    const auto upb = check_unextendible(s);
    if (upb.unextendible && !upb.complete_basis) {
      out.certified = true;
      out.kind = "unextendible";
      out.detail = "unextendible product set on supports " + dims;
      return out;
    }
    out.detail = upb.complete_basis ? "complete product basis of supports " + dims
                                    : "extendible on supports " + dims;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooLarge) throw;
    out.detail = "unextendibility test refused: too many states";
  }
  return out;
}

Certificate activation_search(const StateSet& s, int max_depth) {
  if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be at least 1");
  require_orthogonal(s);
  Engine engine;
  Certificate c;
  c.class_note = class_note();
  c.max_depth = max_depth;

  for (int d = 1; d <= max_depth; ++d) {
    engine.reset_act_cap();
    auto tree = engine.activate(s, d);
    if (tree) {
      c.kind = CertificateKind::Activation;
      c.tree = std::move(*tree);
      c.transcript.push_back("activation found at depth " + std::to_string(d));
      bool ok = true;
      collect_evidence(s, c.tree, "", c, true, ok);
      if (!ok) throw Error(ErrorCode::MalformedTree, "activation tree fails replay");
      c.probabilistic_activation = true;
      return c;
    }
    c.transcript.push_back("no deterministic activation within depth " + std::to_string(d));
    if (d == max_depth) c.incomplete = engine.act_cap_hit();
  }

  // Reachable sets within the depth cap, each tested for distinguishability.
  c.kind = CertificateKind::NonActivabilityInClass;
  std::set<std::string> seen;
  std::vector<std::pair<StateSet, int>> frontier{{s, 0}};
  seen.insert(set_signature(s));
  while (!frontier.empty()) {
    auto [x, level] = std::move(frontier.back());
    frontier.pop_back();
    const std::string sig = set_signature(x);
    ++c.reachable_sets;
    if (x.size() >= 3 && engine.certification(x, sig).certified) c.probabilistic_activation = true;
    engine.reset_dist_cap();
    if (engine.distinguish(x, std::max(max_depth, kReachableDistinguishDepth))) {
      ++c.reachable_distinguishable;
    } else {
      ++c.reachable_undetermined;
      c.transcript.push_back("reachable set not resolved within class: " + join(x.labels()));
    }
    if (level == max_depth || x.size() <= 2) continue;
    for (const auto& pc : engine.candidates(x, sig)) {
      for (const auto& m : pc.measurements) {
        for (auto& r : engine.outcomes(x, m)) {
          if (r.set.empty()) continue;
          if (seen.insert(set_signature(r.set)).second) frontier.push_back({std::move(r.set), level + 1});
        }
      }
    }
  }
  c.transcript.push_back("reachable sets tested for distinguishability with depth " +
                         std::to_string(std::max(max_depth, kReachableDistinguishDepth)));
  c.transcript.push_back(std::to_string(c.reachable_sets) + " reachable sets, " +
                         std::to_string(c.reachable_distinguishable) + " distinguishable in class");
  if (c.incomplete) c.transcript.push_back("INCOMPLETE: depth cap reached while measurements remained");
  return c;
}

namespace {

ProtocolTree replay_rec(const StateSet& s, const ProtocolTree& t) {
  if (std::holds_alternative<ReachedLeaf>(t.node)) return {ReachedLeaf{s}};
  if (!t.is_measure()) return t;
  const auto& m = t.measure();
  check_node(s, m);
  MeasureNode out = m;
  for (std::size_t k = 0; k < m.kraus.size(); ++k) {
    out.children[k] = replay_rec(apply_outcome(s, m.party, m.kraus[k]).set, m.children[k]);
  }
  return {std::move(out)};
}

}  // namespace

ProtocolTree replay(const StateSet& s, const ProtocolTree& t) { return replay_rec(s, t); }

Certificate certify_activation(const StateSet& s, const ProtocolTree& t) {
  require_orthogonal(s);
  Certificate c;
  c.tree = t;
  c.class_note = "scripted protocol";
  c.max_depth = t.depth();
  bool ok = true;
  try {
    collect_evidence(s, t, "", c, true, ok);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotOplm) throw;
    c.kind = CertificateKind::NonActivabilityInClass;
    c.transcript.push_back(std::string("replay failed: ") + e.what());
    return c;
  }
  c.tree = replay(s, t);
  c.kind = ok ? CertificateKind::Activation : CertificateKind::NonActivabilityInClass;
  for (const auto& e : c.leaf_evidence) {
    c.transcript.push_back(e.path + ": " + e.kind + " [" + join(e.labels) + "] " + e.detail);
  }
  c.probabilistic_activation = false;
  for (const auto& e : c.leaf_evidence) {
    c.probabilistic_activation = c.probabilistic_activation || e.kind == "irreducible-exact" || e.kind == "unextendible";
  }
  return c;
}

namespace {

CMatrix diag_projector(int d, std::initializer_list<int> idx) {
  CMatrix p = CMatrix::Zero(d, d);
  for (int i : idx) p(i, i) = 1.0;
  return p;
}

// Children resolved by one party after each outcome of `m` on `s`.
std::vector<ProtocolTree> resolved_children(const StateSet& s, int party, const std::vector<CMatrix>& kraus,
                                            int resolver) {
  std::vector<ProtocolTree> out;
  for (const auto& k : kraus) {
    const auto r = apply_outcome(s, party, k);
    if (r.set.empty()) {
      out.push_back(empty_leaf());
    } else if (r.set.size() == 1) {
      out.push_back(identified(r.set[0].label));
    } else {
      auto t = single_party_resolution(r.set, resolver);
      if (!t) throw Error(ErrorCode::MalformedTree, "scripted branch is not resolvable by one party");
      out.push_back(std::move(*t));
    }
  }
  return out;
}

ProtocolTree s3_discrimination() {
  const StateSet s = build_fixture("s3");
  const CMatrix p1 = projector(local_combo(6, {0, 4}, {1, -1}));
  const CMatrix p2 = projector(local_combo(6, {2, 3}, {1, -1}));
  const CMatrix p3 = projector(local_combo(6, {0, 1, 2, 3, 4, 5}));
  std::vector<CMatrix> kraus{p1, p2, p3, CMatrix::Identity(6, 6) - p1 - p2 - p3};
  auto children = resolved_children(s, 1, kraus, 0);
  return measure_node(1, kraus, {"M_B1", "M_B2", "M_B3", "M_B4"}, std::move(children));
}

ProtocolTree k_cascade(int first, int second, const CMatrix& k1_first, const CMatrix& k1_second) {
  const int d1 = static_cast<int>(k1_first.rows());
  const int d2 = static_cast<int>(k1_second.rows());
  const CMatrix k2_first = CMatrix::Identity(d1, d1) - k1_first;
  const CMatrix k2_second = CMatrix::Identity(d2, d2) - k1_second;
  auto inner = [&] { return measure_node(second, {k1_second, k2_second}, {"K_A1", "K_A2"}, {reached(), reached()}); };
  return measure_node(first, {k1_first, k2_first}, {"K_B1", "K_B2"}, {inner(), inner()});
}

ProtocolTree s3_activation() { return k_cascade(1, 0, diag_projector(6, {0, 1, 2}), diag_projector(6, {0, 1, 2})); }

// Cut A|BC of s4: BC (party 1, index 2b + c) measures C, then the s3 cascade.
ProtocolTree s4_abc_activation() {
  const CMatrix i2 = CMatrix::Identity(2, 2);
  const CMatrix kb = kron(diag_projector(6, {0, 1, 2}), i2);
  const CMatrix ka = diag_projector(6, {0, 1, 2});
  std::vector<CMatrix> c_kraus{kron(CMatrix(CMatrix::Identity(6, 6)), diag_projector(2, {0})),
                               kron(CMatrix(CMatrix::Identity(6, 6)), diag_projector(2, {1}))};
  return measure_node(1, c_kraus, {"C=0", "C=1"}, {k_cascade(1, 0, kb, ka), k_cascade(1, 0, kb, ka)});
}

// Alternating {P_L, I - P_L} rounds, A then B, closing each branch by a
// one-party resolution when available.
ProtocolTree layered_recursion(const StateSet& s, int turn) {
  if (s.empty()) return empty_leaf();
  if (s.size() == 1) return identified(s[0].label);
  const int party = turn % 2;
  for (int p : {1 - party, party}) {
    if (auto t = single_party_resolution(s, p)) return *t;
  }
  const int d = s.space.dim(party);
  const int layer = turn / 2;
  if (layer >= d) throw Error(ErrorCode::MalformedTree, "layered recursion ran out of layers");
  CMatrix p = CMatrix::Zero(d, d);
  p(layer, layer) = 1.0;
  std::vector<CMatrix> kraus{p, CMatrix::Identity(d, d) - p};
  std::vector<ProtocolTree> children;
  for (const auto& k : kraus) children.push_back(layered_recursion(apply_outcome(s, party, k).set, turn + 1));
  const std::string l = std::to_string(layer);
  return measure_node(party, kraus, {"P" + l, "I-P" + l}, std::move(children));
}

}  // namespace

std::vector<std::string> builtin_protocol_names() {
  return {"s3_discrimination", "s3_activation", "s1_recursion", "s4_abc_activation"};
}

ProtocolTree builtin_protocol(std::string_view name) {
  if (name == "s3_discrimination") return s3_discrimination();
  if (name == "s3_activation") return s3_activation();
  if (name == "s1_recursion") return layered_recursion(build_fixture("s1"), 0);
  if (name == "s4_abc_activation") return s4_abc_activation();
  throw Error(ErrorCode::UnknownName, "unknown builtin protocol '" + std::string(name) + "'");
}

}  // namespace qlocc
