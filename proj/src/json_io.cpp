#include "qlocc/json_io.hpp"

#include <fstream>
#include <sstream>

#include "qlocc/qset.hpp"

namespace qlocc {
namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedTree, what); }

}  // namespace

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) malformed("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) malformed("ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& e = row[static_cast<std::size_t>(k)];
      if (e.is_number()) {
        m(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        malformed("matrix entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

Json to_json(const ProtocolTree& t) {
  return std::visit(
      [](const auto& n) -> Json {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, EmptyLeaf>) {
          return Json{{"empty", true}};
        } else if constexpr (std::is_same_v<N, IdentifiedLeaf>) {
          return Json{{"identified", n.label}};
        } else if constexpr (std::is_same_v<N, ReachedLeaf>) {
          return Json{{"set", n.set ? Json(serialize_qset(*n.set)) : Json(nullptr)}};
        } else {
          Json outcomes = Json::array();
          for (std::size_t k = 0; k < n.kraus.size(); ++k) {
            Json o;
            o["kraus"] = to_json(n.kraus[k]);
            if (k < n.labels.size() && !n.labels[k].empty()) o["label"] = n.labels[k];
            o["child"] = to_json(n.children[k]);
            outcomes.push_back(std::move(o));
          }
          return Json{{"party", n.party}, {"outcomes", std::move(outcomes)}};
        }
      },
      t.node);
}

ProtocolTree tree_from_json(const Json& j) {
  if (!j.is_object()) malformed("tree node must be an object");
  if (j.contains("party")) {
    if (!j["party"].is_number_integer()) malformed("party must be an integer");
    if (!j.contains("outcomes") || !j["outcomes"].is_array() || j["outcomes"].empty()) {
      malformed("measurement node needs a non-empty outcomes array");
    }
    MeasureNode m;
    m.party = j["party"].get<int>();
    for (const auto& o : j["outcomes"]) {
      if (!o.is_object() || !o.contains("kraus") || !o.contains("child")) malformed("outcome needs kraus and child");
      m.kraus.push_back(matrix_from_json(o["kraus"]));
      m.labels.push_back(o.contains("label") ? o["label"].get<std::string>() : std::string());
      m.children.push_back(tree_from_json(o["child"]));
    }
    return {std::move(m)};
  }
  if (j.contains("identified")) {
    if (!j["identified"].is_string()) malformed("identified label must be a string");
    return identified(j["identified"].get<std::string>());
  }
  if (j.contains("set")) {
    if (j["set"].is_null()) return reached();
    if (!j["set"].is_string()) malformed("set leaf must hold an inline qset string or null");
    return {ReachedLeaf{parse_qset(j["set"].get<std::string>())}};
  }
  if (j.contains("empty")) return empty_leaf();
  malformed("unrecognized tree node");
}

ProtocolTree load_protocol(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open protocol file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    malformed(std::string("protocol JSON: ") + e.what());
  }
  if (j.contains("tree") && !j.contains("party")) return tree_from_json(j["tree"]);
  return tree_from_json(j);
}

Json to_json(const Certificate& c) {
  Json j;
  j["kind"] = std::string(to_string(c.kind));
  j["class_note"] = c.class_note;
  j["max_depth"] = c.max_depth;
  j["incomplete"] = c.incomplete;
  j["tree_depth"] = c.tree.depth();
  j["leaves"] = c.tree.leaf_count();
  if (c.kind == CertificateKind::NonActivabilityInClass) {
    j["reachable_sets"] = c.reachable_sets;
    j["reachable_distinguishable"] = c.reachable_distinguishable;
    j["reachable_undetermined"] = c.reachable_undetermined;
  }
  j["probabilistic_activation"] = c.probabilistic_activation;
  Json ev = Json::array();
  for (const auto& e : c.leaf_evidence) {
    ev.push_back(Json{{"path", e.path.empty() ? "root" : e.path}, {"kind", e.kind}, {"labels", e.labels}, {"detail", e.detail}});
  }
  j["leaf_evidence"] = std::move(ev);
  j["transcript"] = c.transcript;
  j["tree"] = to_json(c.tree);
  return j;
}

const ProtocolTree& node_at(const ProtocolTree& t, std::string_view path) {
  if (path.empty() || path == "root") return t;
  const ProtocolTree* cur = &t;
  std::stringstream ss{std::string(path)};
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!cur->is_measure()) malformed("node path " + std::string(path) + " passes through a leaf");
    std::size_t k = 0;
    try {
      k = std::stoul(part);
    } catch (const std::exception&) {
      malformed("bad node path component '" + part + "'");
    }
    if (k >= cur->measure().children.size()) malformed("node path " + std::string(path) + " is out of range");
    cur = &cur->measure().children[k];
  }
  return *cur;
}

}  // namespace qlocc
