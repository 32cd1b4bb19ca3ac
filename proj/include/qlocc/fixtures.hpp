#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qlocc/state.hpp"

namespace qlocc {

enum class Variant { Corrected, Verbatim };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

struct FixtureDescriptor {
  std::string name;  // s1 s2 s3 s4 s5 s6 tiles33 s1_general
  Variant variant = Variant::Corrected;
  int d = 4;  // only read by s1_general
  std::string notes;
};

// Accepts "s1_general(6)" as shorthand for name + d.
FixtureDescriptor describe_fixture(std::string_view name, Variant variant = Variant::Corrected);
StateSet build_fixture(const FixtureDescriptor& desc);
StateSet build_fixture(std::string_view name, Variant variant = Variant::Corrected);

std::vector<std::string> fixture_names();

struct Correction {
  std::string printed;
  std::string corrected;
  std::string justification;
};

std::vector<Correction> fixture_corrections(std::string_view name);

// Local building blocks: |i>, and (sum_k sign_k |i_k>) unnormalized.
CVector basis_vector(int d, int i);
CVector local_combo(int d, const std::vector<int>& indices, const std::vector<double>& signs = {});

}  // namespace qlocc
