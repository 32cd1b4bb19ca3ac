#pragma once

#include <string>
#include <string_view>

#include "qlocc/state.hpp"

namespace qlocc {

// Line-oriented text format:
//
//   qset v1
//   dims: 6 6
//   split: 1 = 2 3
//   name: s3
//   state phi1: 1/2*|0,0> - 1/2*|0,1> + (0.5,0)*|0,4> - 0.5*|0,5>
//
// Coefficients: decimal, p/q, (re,im) or 1/sqrt(n). States are normalized
// on load. Errors carry line, column and the offending lexeme.
StateSet parse_qset(std::string_view text);
StateSet load_qset(const std::string& path);

// Canonical form: (re,im) coefficients with 17 significant digits, terms in
// ascending basis order. Byte-identical for identical input.
std::string serialize_qset(const StateSet& s);

}  // namespace qlocc
