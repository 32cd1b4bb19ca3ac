#pragma once

#include <string_view>

#include "json.hpp"
#include "qlocc/protocol.hpp"

namespace qlocc {

using Json = nlohmann::ordered_json;

// Matrices as nested [re, im] arrays, row by row.
Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

// Nodes: {"party", "outcomes": [{"kraus", "label", "child"}]}. Leaves:
// {"identified": label}, {"set": inline qset or null}, {"empty": true}.
Json to_json(const ProtocolTree& t);
ProtocolTree tree_from_json(const Json& j);
ProtocolTree load_protocol(const std::string& path);

Json to_json(const Certificate& c);

// Node addressed by outcome indices from the root: "root" or "0.2.1".
const ProtocolTree& node_at(const ProtocolTree& t, std::string_view path);

}  // namespace qlocc
