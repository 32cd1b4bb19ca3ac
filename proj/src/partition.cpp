#include "qlocc/partition.hpp"

#include <algorithm>

namespace qlocc {

QubitRule qubit_times_n_rule(const StateSet& s) {
  QubitRule r;
  if (s.space.parties() != 2) {
    r.reason = "not bipartite";
    return r;
  }
  for (int p : {0, 1}) {
    if (s.space.dim(p) == 2) r.qubit_party = p;
  }
  if (r.qubit_party < 0) {
    r.reason = "no two-dimensional party";
    return r;
  }
  for (const auto& k : s.states) {
    if (schmidt_rank(k, {{0}, {1}}) != 1) {
      r.qubit_party = -1;
      r.reason = "state " + k.label + " is entangled across the cut";
      return r;
    }
  }
  r.applicable = true;
  r.distinguishable = true;
  r.non_activable = true;
  r.reason = "product states in C^2 x C^" + std::to_string(s.space.dim(1 - r.qubit_party)) +
             " are locally distinguishable, and local operations keep them in that class";
  return r;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(Basis b) { return b == Basis::Exact ? "EXACT" : "IN-CLASS"; }

std::string partition_name(const std::vector<std::vector<int>>& blocks, int parties) {
  auto letter = [parties](int p) {
    return parties <= 26 ? std::string(1, static_cast<char>('A' + p)) : "P" + std::to_string(p);
  };
  std::string out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b) out += "|";
    for (int p : blocks[b]) out += letter(p);
  }
  return out;
}

namespace {

// Two-block partitions, smaller block first; ties keep party 0 on the left.
std::vector<std::vector<std::vector<int>>> bipartitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<int> left, right;
    for (int p = 0; p < n; ++p) ((mask >> p) & 1u ? left : right).push_back(p);
    if (left.size() > right.size()) continue;
    if (left.size() == right.size() && left.front() != 0) continue;
    out.push_back({left, right});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a[0].size() != b[0].size()) return a[0].size() < b[0].size();
    return a[0] < b[0];
  });
  return out;
}

std::vector<int> first_round_dims(const StateSet& x) {
  std::vector<int> d;
  for (int p = 0; p < x.space.parties(); ++p) d.push_back(oplm_space(x, p).space_dim);
  return d;
}

void analyse(const StateSet& x, PartitionRecord& rec, const ProfileOptions& opt, PartitionProfile& prof) {
  rec.first_round_space_dims = first_round_dims(x);
  if (x.space.parties() == 2) {
    const auto rule = qubit_times_n_rule(x);
    if (rule.applicable) {
      rec.method = "qubit-rule";
      rec.distinguishable = Verdict::Yes;
      rec.activable = Verdict::No;
      rec.basis = Basis::Exact;
      rec.note = rule.reason;
      return;
    }
  }
  if (auto it = opt.scripted.find(rec.name); it != opt.scripted.end()) {
    auto cert = certify_activation(x, it->second);
    if (cert.kind == CertificateKind::Activation) {
      rec.method = "scripted";
      rec.activable = Verdict::Yes;
      rec.basis = Basis::Exact;
      rec.note = "scripted protocol replayed; every leaf certified";
      rec.certificate = std::move(cert);
    } else {
      prof.transcript.push_back(rec.name + ": scripted protocol did not certify; falling back to search");
    }
  }
  const auto dist = search_distinguishing_protocol(x, std::max(opt.max_depth, kReachableDistinguishDepth));
  rec.distinguishable = dist.certificate ? Verdict::Yes : Verdict::Unknown;
  if (rec.activable == Verdict::Yes) return;
  rec.method = "search";
  auto cert = activation_search(x, opt.max_depth);
  if (cert.kind == CertificateKind::Activation) {
    rec.activable = Verdict::Yes;
    rec.basis = Basis::Exact;
    rec.note = "activation protocol found by search";
  } else {
    rec.activable = cert.incomplete ? Verdict::Unknown : Verdict::No;
    rec.basis = Basis::InClass;
    rec.note = cert.incomplete ? "search hit the depth cap" : "no activation in the searched class";
  }
  rec.certificate = std::move(cert);
}

}  // namespace

PartitionProfile hidden_nonlocality_profile(const StateSet& s, const ProfileOptions& opt) {
  const int n = s.space.parties();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "profile needs at least two parties");
  require_orthogonal(s);
  PartitionProfile prof;

  std::vector<std::vector<int>> finest_blocks;
  for (int p = 0; p < n; ++p) finest_blocks.push_back({p});
  PartitionRecord finest;
  finest.blocks = finest_blocks;
  finest.name = partition_name(finest_blocks, n);

  if (n == 2) {
    analyse(s, finest, opt, prof);
    HFlag h;
    h.k = 1;
    h.nonzero = finest.activable;
    h.basis = finest.basis;
    h.evidence = finest.name + " " + finest.method;
    prof.partitions.push_back(std::move(finest));
    prof.h_flags.push_back(h);
    return prof;
  }

  std::vector<PartitionRecord> cuts;
  for (const auto& blocks : bipartitions(n)) {
    PartitionRecord rec;
    rec.blocks = blocks;
    rec.name = partition_name(blocks, n);
    analyse(bipartite_view(s, {blocks[0], blocks[1]}), rec, opt, prof);
    prof.transcript.push_back(rec.name + ": activable " + std::string(to_string(rec.activable)) + " by " + rec.method);
    cuts.push_back(std::move(rec));
  }

  const bool all_cuts_no = std::all_of(cuts.begin(), cuts.end(), [](const auto& c) { return c.activable == Verdict::No; });
  const bool any_cut_yes = std::any_of(cuts.begin(), cuts.end(), [](const auto& c) { return c.activable == Verdict::Yes; });
  if (all_cuts_no) {
    finest.method = "dominance";
    finest.activable = Verdict::No;
    finest.basis = std::all_of(cuts.begin(), cuts.end(), [](const auto& c) { return c.basis == Basis::Exact; })
                       ? Basis::Exact
                       : Basis::InClass;
    finest.first_round_space_dims = first_round_dims(s);
    const auto dist = search_distinguishing_protocol(s, std::max(opt.max_depth, kReachableDistinguishDepth));
    finest.distinguishable = dist.certificate ? Verdict::Yes : Verdict::Unknown;
    finest.note = "no bipartition is activable and merging parties only adds operations";
  } else {
    analyse(s, finest, opt, prof);
  }
  prof.transcript.push_back(finest.name + ": activable " + std::string(to_string(finest.activable)) + " by " +
                            finest.method);
  if (finest.activable == Verdict::Yes && !any_cut_yes) {
    prof.consistent = false;
    prof.transcript.push_back("inconsistent: the finest partition is activable but no bipartition is");
  }

  HFlag h1;
  h1.k = 1;
  h1.nonzero = finest.activable;
  h1.basis = finest.basis;
  h1.evidence = finest.name + " " + finest.method + ": " + finest.note;
  prof.h_flags.push_back(h1);

  // Minimal-k reading: H_2 != 0 when activation needs exactly one merge.
  // Flags for k >= 3 are only derived for the tripartite case (k <= N-1 = 2).
  for (int k = 2; k <= n - 1; ++k) {
    HFlag h;
    h.k = k;
    if (n != 3) {
      h.nonzero = Verdict::Unknown;
      h.evidence = "per-partition facts only for more than three parties";
    } else if (finest.activable == Verdict::Yes) {
      h.nonzero = Verdict::No;
      h.basis = Basis::Exact;
      h.evidence = "already activable with every party separated";
    } else if (any_cut_yes) {
      std::string names;
      for (const auto& c : cuts) {
        if (c.activable == Verdict::Yes) names += (names.empty() ? "" : ", ") + c.name;
      }
      h.nonzero = finest.activable == Verdict::No ? Verdict::Yes : Verdict::Unknown;
      h.basis = finest.basis;
      h.evidence = "activable in " + names + "; finest partition " + std::string(to_string(finest.activable));
    } else if (all_cuts_no) {
      h.nonzero = Verdict::No;
      h.basis = finest.basis;
      h.evidence = "no bipartition is activable";
    } else {
      h.nonzero = Verdict::Unknown;
      h.evidence = "some bipartition verdict is unknown";
    }
    prof.h_flags.push_back(h);
  }
  prof.partitions.push_back(std::move(finest));
  for (auto& c : cuts) prof.partitions.push_back(std::move(c));
  return prof;
}

}  // namespace qlocc
