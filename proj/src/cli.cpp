#include "qlocc/cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "qlocc/fixtures.hpp"
#include "qlocc/json_io.hpp"
#include "qlocc/partition.hpp"
#include "qlocc/qset.hpp"
#include "qlocc/render.hpp"

namespace qlocc {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

namespace {

struct Options {
  std::string set_path;
  bool json = false;
  double tol = kOrthoTolerance;
  bool tol_given = false;
  int max_depth = kDefaultMaxDepth;
  std::uint64_t seed = 1;
  std::string protocol;
  std::string format = "ascii";
  std::string output;
  std::string overlay;
  int oracle_restarts = 0;
  int party = -1;
  std::string mode = "full";
  std::string variant = "corrected";
  std::string fixture_name;
  bool list = false;
  bool no_pairs = false;
  bool reorder = false;
  std::vector<std::string> scripts;  // PARTITION=PROTOCOL
};

// Negative verdicts are reported, not thrown.
struct Outcome {
  int code = 0;
  Json report;
  std::string text;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (const auto& x : v) out += (out.empty() ? "" : sep) + x;
  return out;
}

class Command {
 public:
  explicit Command(const Options& o) : o_(o) {}

  Json inputs = Json::array();

  StateSet load_set() {
    if (o_.set_path.empty()) throw Error(ErrorCode::InvalidArgument, "--set is required");
    const std::string text = read_file(o_.set_path);
    inputs.push_back(Json{{"role", "set"}, {"path", o_.set_path}, {"sha256", sha256_hex(text)}});
    return parse_qset(text);
  }

  // PROTOCOL is a JSON file or builtin:NAME.
  ProtocolTree load_tree(const std::string& source) {
    if (source.rfind("builtin:", 0) == 0) {
      const std::string name = source.substr(8);
      inputs.push_back(Json{{"role", "protocol"}, {"builtin", name}});
      return builtin_protocol(name);
    }
    const std::string text = read_file(source);
    inputs.push_back(Json{{"role", "protocol"}, {"path", source}, {"sha256", sha256_hex(text)}});
    try {
      return tree_from_json(Json::parse(text));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::MalformedTree, std::string("protocol JSON: ") + e.what());
    }
  }

 private:
  const Options& o_;
};

SupportMode parse_mode(const std::string& m) {
  if (m == "full") return SupportMode::Full;
  if (m == "restricted") return SupportMode::Restricted;
  throw Error(ErrorCode::InvalidArgument, "mode must be full or restricted");
}

Json measurement_json(const LocalMeasurement& m) {
  Json outs = Json::array();
  for (std::size_t k = 0; k < m.outcomes.size(); ++k) {
    outs.push_back(Json{{"label", k < m.labels.size() ? m.labels[k] : ""}, {"kraus", to_json(m.outcomes[k])}});
  }
  return Json{{"party", m.party}, {"outcomes", std::move(outs)}};
}

Outcome cmd_fixture(const Options& o) {
  Outcome r;
  if (o.list || o.fixture_name.empty()) {
    r.report["fixtures"] = fixture_names();
    r.text = join(fixture_names(), "\n") + "\n";
    return r;
  }
  const auto desc = describe_fixture(o.fixture_name, parse_variant(o.variant));
  const StateSet s = build_fixture(desc);
  const std::string text = serialize_qset(s);
  r.report["fixture"] = desc.name;
  r.report["variant"] = std::string(to_string(desc.variant));
  r.report["states"] = s.size();
  r.report["sha256"] = sha256_hex(text);
  Json corr = Json::array();
  for (const auto& c : fixture_corrections(desc.name)) {
    corr.push_back(Json{{"printed", c.printed}, {"corrected", c.corrected}, {"justification", c.justification}});
  }
  r.report["corrections"] = std::move(corr);
  if (!o.output.empty()) {
    std::ofstream(o.output, std::ios::binary) << text;
    r.report["output"] = o.output;
    r.text = "wrote " + std::to_string(s.size()) + " states to " + o.output + "\n";
  } else {
    r.report["qset"] = text;
    r.text = text;
  }
  return r;
}

Outcome cmd_check_ortho(const Options& o, Command& c) {
  const StateSet s = c.load_set();
  const auto rep = gram_check(s, o.tol);
  Outcome r;
  r.code = rep.pass ? 0 : 1;
  r.report["verdict"] = rep.pass ? "ORTHOGONAL" : "NOT-ORTHOGONAL";
  r.report["basis"] = "EXACT";
  r.report["states"] = s.size();
  Json v = Json::array();
  for (const auto& g : rep.violations) {
    v.push_back(Json{{"i", s[g.i].label}, {"j", s[g.j].label}, {"overlap", g.magnitude}});
  }
  r.report["violations"] = std::move(v);
  r.text = std::string(rep.pass ? "ORTHOGONAL" : "NOT-ORTHOGONAL") + ": " + std::to_string(s.size()) + " states, tol " +
           fmt(o.tol) + "\n";
  for (const auto& g : rep.violations) {
    r.text += "  <" + s[g.i].label + "|" + s[g.j].label + "> = " + fmt(g.magnitude) + "\n";
  }
  return r;
}

Outcome cmd_redundancy(const Options& o, Command& c) {
  const StateSet s = c.load_set();
  const auto rep = redundancy_check(s, o.tol);
  Outcome r;
  r.code = rep.redundant ? 1 : 0;
  r.report["verdict"] = rep.redundant ? "REDUNDANT" : "IRREDUNDANT";
  r.report["basis"] = "EXACT";
  Json ds = Json::array();
  r.text = std::string(rep.redundant ? "REDUNDANT" : "IRREDUNDANT") + "\n";
  for (const auto& d : rep.discards) {
    Json j{{"kept_factors", d.kept_factors}, {"discarded_factors", d.discarded_factors},
           {"orthogonal_after", d.orthogonal_after}};
    std::string line = "  discard factors {";
    for (std::size_t i = 0; i < d.discarded_factors.size(); ++i) line += (i ? "," : "") + std::to_string(d.discarded_factors[i]);
    line += "}: ";
    if (d.witness) {
      j["witness"] = {s[d.witness->first].label, s[d.witness->second].label};
      line += "witness (" + s[d.witness->first].label + ", " + s[d.witness->second].label + "), " +
              std::to_string(d.violations.size()) + " violating pairs";
    } else {
      line += "orthogonality survives";
    }
    Json viol = Json::array();
    for (const auto& [i, k] : d.violations) viol.push_back({s[i].label, s[k].label});
    j["violations"] = std::move(viol);
    ds.push_back(std::move(j));
    r.text += line + "\n";
  }
  r.report["discards"] = std::move(ds);
  return r;
}

Outcome cmd_oplm(const Options& o, Command& c) {
  const StateSet s = c.load_set();
  const SupportMode mode = parse_mode(o.mode);
  Outcome r;
  Json parties = Json::array();
  for (int p = 0; p < s.space.parties(); ++p) {
    if (o.party >= 0 && p != o.party) continue;
    const auto sp = oplm_space(s, p, mode);
    Json j{{"party", p}, {"space_dim", sp.space_dim}, {"trivial", is_trivial(sp)}, {"working_dim", sp.working_dim()}};
    Json basis = Json::array();
    for (const auto& e : sp.basis) basis.push_back(to_json(e));
    j["basis"] = std::move(basis);
    r.text += "party " + std::to_string(p) + ": space_dim " + std::to_string(sp.space_dim);
    BlockStructure bs = block_structure(sp);
    std::string cls = "block-projective";
    if (!bs.commuting) {
      bs = diagonal_block_structure(sp);
      cls = "diagonal-fallback";
    }
    j["measurement_class"] = cls;
    j["blocks"] = bs.blocks.size();
    Json ms = Json::array();
    const auto list = sp.space_dim > 1 ? projective_oplms(sp, bs) : std::vector<LocalMeasurement>{};
    std::vector<std::string> names;
    for (const auto& m : list) {
      ms.push_back(measurement_json(m));
      names.push_back("{" + join(m.labels, " | ") + "}");
    }
    j["measurements"] = std::move(ms);
    r.text += ", " + std::to_string(bs.blocks.size()) + " blocks (" + cls + "), " + std::to_string(list.size()) +
              " measurements" + (names.empty() ? "" : ": " + join(names)) + "\n";
    parties.push_back(std::move(j));
  }
  r.report["mode"] = o.mode;
  r.report["parties"] = std::move(parties);
  return r;
}

Outcome cmd_irreducible(const Options& o, Command& c) {
  const StateSet s = c.load_set();
  const auto cert = is_locally_irreducible(s, parse_mode(o.mode));
  Outcome r;
  r.code = cert.verdict == Irreducibility::Reducible ? 1 : 0;
  r.report["verdict"] = std::string(to_string(cert.verdict));
  r.report["basis"] = cert.verdict == Irreducibility::IrreducibleInClass ? "IN-CLASS" : "EXACT";
  r.report["mode"] = o.mode;
  r.report["space_dims"] = cert.space_dims;
  if (cert.witness) {
    r.report["witness"] = measurement_json(*cert.witness);
    r.report["witness_eliminations"] = cert.witness_eliminations;
  }
  r.report["transcript"] = cert.transcript;
  r.text = std::string(to_string(cert.verdict)) + "\n";
  for (const auto& l : cert.transcript) r.text += "  " + l + "\n";
  return r;
}

Outcome cmd_upb(const Options& o, Command& c) {
  const StateSet s = c.load_set();
  const auto v = check_unextendible(s);
  Outcome r;
  const std::string verdict = v.complete_basis ? "COMPLETE-BASIS" : v.unextendible ? "UNEXTENDIBLE" : "EXTENDIBLE";
  r.code = v.unextendible && !v.complete_basis ? 0 : 1;
  r.report["verdict"] = verdict;
  r.report["basis"] = "EXACT";
  r.report["method"] = v.method;
  r.report["support_dims"] = v.support_dims;
  r.report["support_note"] = v.support_note;
  r.report["assignments"] = v.assignments;
  r.text = verdict + " (" + v.method + ")";
  if (v.extension) {
    r.report["extension"] = to_json(CMatrix(v.extension->amplitudes));
    r.text += ", orthogonal product state found";
  }
  r.text += "\n";
  if (o.oracle_restarts > 0) {
    const auto ex = numeric_extension_search(s, o.oracle_restarts, o.seed, true);
    const bool found = ex.residual <= kExtensionThreshold;
    r.report["oracle"] = Json{{"restarts", ex.restarts}, {"seed", o.seed}, {"residual", ex.residual},
                              {"extension_found", found}, {"agrees", found == !v.unextendible}};
    r.text += "  numeric oracle: residual " + fmt(ex.residual) + " after " + std::to_string(ex.restarts) + " restarts\n";
  }
  return r;
}

Outcome cmd_protocol(const std::string& action, const Options& o, Command& c) {
  const StateSet s = c.load_set();
  Outcome r;
  if (action == "verify") {
    if (o.protocol.empty()) throw Error(ErrorCode::InvalidArgument, "--protocol is required");
    const ProtocolTree t = c.load_tree(o.protocol);
    const auto v = verify_protocol(s, t);
    r.code = v.pass ? 0 : 1;
    r.report["verdict"] = v.pass ? "PASS-DISCRIMINATION" : "FAIL";
    r.report["basis"] = "EXACT";
    if (!v.pass) r.report["failure"] = Json{{"path", v.failure_path}, {"reason", v.failure}};
    r.report["transcript"] = v.transcript;
    r.text = join(v.transcript, "\n") + "\n";
    return r;
  }
  const auto res = search_distinguishing_protocol(s, o.max_depth);
  r.code = res.certificate ? 0 : 1;
  r.report["verdict"] = res.certificate ? "DISTINGUISHABLE" : "NOT-FOUND";
  r.report["basis"] = res.certificate ? "EXACT" : "IN-CLASS";
  r.report["class_note"] = res.class_note;
  r.report["incomplete"] = res.incomplete;
  r.report["nodes"] = res.nodes;
  if (res.certificate) r.report["certificate"] = to_json(*res.certificate);
  r.text = res.certificate ? "DISTINGUISHABLE: protocol of depth " + std::to_string(res.certificate->tree.depth()) + "\n"
                           : std::string("NOT-FOUND within depth ") + std::to_string(o.max_depth) +
                                 (res.incomplete ? " (depth cap reached)" : "") + "\n";
  return r;
}

Outcome cmd_activate(const Options& o, Command& c) {
  const StateSet s = c.load_set();
  const Certificate cert = o.protocol.empty() ? activation_search(s, o.max_depth) : certify_activation(s, c.load_tree(o.protocol));
  Outcome r;
  const bool yes = cert.kind == CertificateKind::Activation;
  r.code = yes ? 0 : 1;
  r.report["verdict"] = yes ? "ACTIVABLE" : "NOT-ACTIVABLE";
  r.report["basis"] = yes ? "EXACT" : "IN-CLASS";
  r.report["certificate"] = to_json(cert);
  r.text = std::string(to_string(cert.kind)) + "\n";
  for (const auto& l : cert.transcript) r.text += "  " + l + "\n";
  return r;
}

Outcome cmd_profile(const Options& o, Command& c) {
  const StateSet s = c.load_set();
  ProfileOptions po;
  po.max_depth = o.max_depth;
  for (const auto& sc : o.scripts) {
    const auto eq = sc.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--script expects PARTITION=PROTOCOL");
    po.scripted[sc.substr(0, eq)] = c.load_tree(sc.substr(eq + 1));
  }
  const auto prof = hidden_nonlocality_profile(s, po);
  Outcome r;
  Json parts = Json::array();
  for (const auto& p : prof.partitions) {
    Json j{{"partition", p.name},
           {"method", p.method},
           {"distinguishable", std::string(to_string(p.distinguishable))},
           {"activable", std::string(to_string(p.activable))},
           {"basis", std::string(to_string(p.basis))},
           {"first_round_space_dims", p.first_round_space_dims},
           {"note", p.note}};
    if (p.certificate) {
      j["certificate"] = Json{{"kind", std::string(to_string(p.certificate->kind))},
                              {"tree_depth", p.certificate->tree.depth()},
                              {"max_depth", p.certificate->max_depth},
                              {"incomplete", p.certificate->incomplete}};
    }
    parts.push_back(std::move(j));
    r.text += p.name + ": activable " + std::string(to_string(p.activable)) + " [" + std::string(to_string(p.basis)) +
              "] by " + p.method + "\n";
  }
  Json flags = Json::object();
  for (const auto& h : prof.h_flags) {
    flags[std::to_string(h.k)] = Json{{"value", h.nonzero == Verdict::Yes ? "nonzero" : h.nonzero == Verdict::No ? "zero" : "unknown"},
                                      {"basis", std::string(to_string(h.basis))},
                                      {"evidence", h.evidence}};
    r.text += "H" + std::to_string(h.k) + " " + std::string(to_string(h.nonzero)) + " [" +
              std::string(to_string(h.basis)) + "] " + h.evidence + "\n";
  }
  r.report["partitions"] = std::move(parts);
  r.report["h_flags"] = std::move(flags);
  r.report["consistent"] = prof.consistent;
  r.report["transcript"] = prof.transcript;
  r.code = prof.consistent ? 0 : 1;
  return r;
}

Outcome cmd_render(const Options& o, Command& c) {
  const StateSet s = c.load_set();
  RenderOptions ro;
  ro.format = parse_render_format(o.format);
  ro.paired = !o.no_pairs;
  ro.reorder = o.reorder;
  if (!o.overlay.empty()) {
    // PROTOCOL:node-path, the path defaulting to the root.
    std::string proto = o.overlay, path = "root";
    if (const auto colon = o.overlay.rfind(':'); colon != std::string::npos && o.overlay.rfind("builtin:", 0) != 0) {
      proto = o.overlay.substr(0, colon), path = o.overlay.substr(colon + 1);
    } else if (o.overlay.rfind("builtin:", 0) == 0) {
      const auto second = o.overlay.find(':', 8);
      if (second != std::string::npos) proto = o.overlay.substr(0, second), path = o.overlay.substr(second + 1);
    }
    const ProtocolTree t = c.load_tree(proto);
    const ProtocolTree& node = node_at(t, path);
    if (!node.is_measure() || node.measure().kraus.size() != 2) {
      throw Error(ErrorCode::InvalidArgument, "overlay node must be a two-outcome measurement");
    }
    const auto& m = node.measure();
    const CMatrix e = m.kraus[0].adjoint() * m.kraus[0];
    ro.overlay = overlay_from_projector(m.party, e, {m.labels[0].empty() ? "1" : m.labels[0], m.labels[1].empty() ? "2" : m.labels[1]});
  }
  const std::string doc = render(s, ro);
  Outcome r;
  r.report["format"] = o.format;
  r.report["sha256"] = sha256_hex(doc);
  if (!o.output.empty()) {
    std::ofstream(o.output, std::ios::binary) << doc;
    r.report["output"] = o.output;
    r.text = "wrote " + o.output + "\n";
  } else {
    r.report["document"] = doc;
    r.text = doc;
  }
  return r;
}

int exit_code_for(const Error& e) { return e.code() == ErrorCode::NotOrthogonal ? 1 : 2; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv("QLOCC_TOL")) {
    try {
      o.tol = std::stod(env);
    } catch (const std::exception&) {
      err << "error: QLOCC_TOL is not a number\n";
      return 2;
    }
  }
  CLI::App app{"Local distinguishability toolkit for orthogonal multipartite state sets", "qlocc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto common = [&](CLI::App* sub, bool needs_set) {
    auto* opt = sub->add_option("--set", o.set_path, "input .qset file");
    if (needs_set) opt->required();
    sub->add_flag("--json", o.json, "JSON report on standard output");
    sub->add_option("--tol", o.tol, "orthogonality tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-depth", o.max_depth, "search depth cap")->check(CLI::Range(1, 64));
    sub->add_option("--seed", o.seed, "seed for the numeric oracle");
  };

  auto* fixture = app.add_subcommand("fixture", "export a built-in fixture as qset");
  fixture->add_option("name", o.fixture_name, "fixture name, e.g. s1 or s1_general(6)");
  fixture->add_option("--variant", o.variant, "corrected | verbatim");
  fixture->add_option("-o,--output", o.output, "output file");
  fixture->add_flag("--list", o.list, "list fixture names");
  fixture->add_flag("--json", o.json, "JSON report");

  auto* ortho = app.add_subcommand("check-ortho", "pairwise orthogonality");
  common(ortho, true);
  auto* redund = app.add_subcommand("redundancy", "local redundancy under factor discards");
  common(redund, true);
  auto* oplm = app.add_subcommand("oplm", "OPLM spaces and block-projective measurements");
  common(oplm, true);
  oplm->add_option("--party", o.party, "single party");
  oplm->add_option("--mode", o.mode, "full | restricted");
  auto* irr = app.add_subcommand("irreducible", "local irreducibility");
  common(irr, true);
  irr->add_option("--mode", o.mode, "full | restricted");
  auto* upb = app.add_subcommand("upb", "unextendibility of a product set");
  common(upb, true);
  upb->add_option("--oracle-restarts", o.oracle_restarts, "numeric extension search restarts")->check(CLI::NonNegativeNumber);
  auto* protocol = app.add_subcommand("protocol", "verify or search discrimination protocols");
  protocol->require_subcommand(1);
  auto* verify = protocol->add_subcommand("verify", "verify a protocol tree");
  common(verify, true);
  verify->add_option("--protocol", o.protocol, "protocol JSON file or builtin:NAME")->required();
  auto* search = protocol->add_subcommand("search", "search for a discrimination protocol");
  common(search, true);
  auto* act = app.add_subcommand("activate", "search or replay an activation protocol");
  common(act, true);
  act->add_option("--protocol", o.protocol, "protocol JSON file or builtin:NAME");
  auto* profile = app.add_subcommand("profile", "hidden nonlocality across partitions");
  common(profile, true);
  profile->add_option("--script", o.scripts, "PARTITION=PROTOCOL tried before search, e.g. A|BC=builtin:s4_abc_activation");
  auto* rend = app.add_subcommand("render", "tiling diagram");
  common(rend, true);
  rend->add_option("--format", o.format, "ascii | svg");
  rend->add_option("-o,--output", o.output, "output file");
  rend->add_option("--overlay", o.overlay, "PROTOCOL.json:node-path or builtin:NAME:node-path");
  rend->add_flag("--no-pairs", o.no_pairs, "refuse entangled states instead of drawing linked rectangles");
  rend->add_flag("--reorder", o.reorder, "reorder local bases when supports are not contiguous");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  Command c(o);
  Outcome r;
  std::string name;
  try {
    if (*fixture) name = "fixture", r = cmd_fixture(o);
    else if (*ortho) name = "check-ortho", r = cmd_check_ortho(o, c);
    else if (*redund) name = "redundancy", r = cmd_redundancy(o, c);
    else if (*oplm) name = "oplm", r = cmd_oplm(o, c);
    else if (*irr) name = "irreducible", r = cmd_irreducible(o, c);
    else if (*upb) name = "upb", r = cmd_upb(o, c);
    else if (*verify) name = "protocol verify", r = cmd_protocol("verify", o, c);
    else if (*search) name = "protocol search", r = cmd_protocol("search", o, c);
    else if (*act) name = "activate", r = cmd_activate(o, c);
    else if (*profile) name = "profile", r = cmd_profile(o, c);
    else if (*rend) name = "render", r = cmd_render(o, c);
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    if (o.json) {
      Json j{{"tool", "qlocc"}, {"version", kToolVersion}, {"command", name}, {"inputs", c.inputs},
             {"error", Json{{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}}}};
      out << j.dump(2) << "\n";
    }
    err << "error: " << e.what() << "\n";
    return code;
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (o.json) {
    Json j;
    j["tool"] = "qlocc";
    j["version"] = kToolVersion;
    j["command"] = name;
    j["inputs"] = c.inputs;
    j["parameters"] = Json{{"tol", o.tol}, {"max_depth", o.max_depth}, {"seed", o.seed}};
    for (auto& [k, v] : r.report.items()) j[k] = v;
    j["exit_code"] = r.code;
    j["timing_ms"] = ms;
    out << j.dump(2) << "\n";
  } else {
    out << r.text;
  }
  return r.code;
}

}  // namespace qlocc
