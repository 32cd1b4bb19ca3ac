#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qlocc {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 clean or affirmative verdict, 1 negative verdict, 2 input
// or usage error. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace qlocc
