#include "qlocc/fixtures.hpp"

#include <charconv>

namespace qlocc {
namespace {

using Locals = std::vector<CVector>;

std::string pair_name(int i, int j) {
  if (i < 10 && j < 10) return std::to_string(i) + std::to_string(j);
  return std::to_string(i) + "," + std::to_string(j);
}

std::string sign_char(double s) { return s > 0 ? "+" : "-"; }

CVector dom(int d, int i, int j, double s) { return local_combo(d, {i, j}, {1.0, s}); }

// Sum of two product terms, normalized. Used for the W-type entangled states.
Ket superpose(const PartySpace& sp, const Locals& a, const Locals& b, std::string label) {
  const Ket ka = product_ket(sp, a, "");
  const Ket kb = product_ket(sp, b, "");
  CVector v = ka.amplitudes + kb.amplitudes;
  v.normalize();
  return {sp, v, std::move(label)};
}

StateSet s1_general(int d) {
  if (d < 4 || d % 2 != 0) throw Error(ErrorCode::InvalidArgument, "s1_general needs an even d >= 4");
  StateSet s;
  s.space = PartySpace({d, d});
  s.name = d == 4 ? "s1" : "s1_general(" + std::to_string(d) + ")";
  auto e = [d](int i) { return basis_vector(d, i); };
  for (int layer = 0; layer < d; ++layer) {
    // Row A = layer, B from layer to d-1.
    int b = layer;
    for (; b + 1 < d; b += 2) {
      for (double sg : {1.0, -1.0}) {
        s.states.push_back(product_ket(s.space, {e(layer), dom(d, b, b + 1, sg)},
                                       std::to_string(layer) + "|X" + pair_name(b, b + 1) + sign_char(sg)));
      }
    }
    if (b < d) s.states.push_back(product_ket(s.space, {e(layer), e(b)}, std::to_string(layer) + "|" + std::to_string(b)));
    // Column B = layer, A from layer+1 to d-1.
    int a = layer + 1;
    for (; a + 1 < d; a += 2) {
      for (double sg : {1.0, -1.0}) {
        s.states.push_back(product_ket(s.space, {dom(d, a, a + 1, sg), e(layer)},
                                       "xi" + pair_name(a, a + 1) + sign_char(sg) + "|" + std::to_string(layer)));
      }
    }
    if (a < d) s.states.push_back(product_ket(s.space, {e(a), e(layer)}, std::to_string(a) + "|" + std::to_string(layer)));
  }
  return s;
}

StateSet s2() {
  StateSet s;
  s.space = PartySpace({4, 2, 2});
  s.name = "s2";
  auto a = [](int i) { return basis_vector(4, i); };
  auto q = [](int i) { return basis_vector(2, i); };
  auto add = [&](Locals l, std::string label) { s.states.push_back(product_ket(s.space, std::move(l), std::move(label))); };
  for (int b : {0, 1}) {
    for (double sg : {1.0, -1.0}) add({a(0), q(b), dom(2, 0, 1, sg)}, "0|" + std::to_string(b) + "|Y01" + sign_char(sg));
  }
  for (double sg : {1.0, -1.0}) add({dom(4, 1, 2, sg), q(0), q(0)}, "xi12" + sign_char(sg) + "|0|0");
  add({a(3), q(0), q(0)}, "3|0|0");
  add({a(1), q(1), q(0)}, "1|1|0");
  add({a(3), q(1), q(0)}, "3|1|0");
  for (double sg : {1.0, -1.0}) add({a(1), dom(2, 0, 1, sg), q(1)}, "1|X01" + sign_char(sg) + "|1");
  for (double sg : {1.0, -1.0}) add({dom(4, 2, 3, sg), q(0), q(1)}, "xi23" + sign_char(sg) + "|0|1");
  add({a(3), q(1), q(1)}, "3|1|1");
  return s;
}

StateSet s3() {
  StateSet s;
  s.space = PartySpace({6, 6}, {{}, {2, 3}});
  s.name = "s3";
  const CVector b1 = local_combo(6, {0, 1, 4, 5}, {1, -1, 1, -1});
  const CVector b2 = local_combo(6, {1, 2, 5, 3}, {1, -1, 1, -1});
  const CVector b3 = local_combo(6, {0, 4}, {1, -1});
  const CVector b4 = local_combo(6, {2, 3}, {1, -1});
  const CVector b5 = local_combo(6, {0, 1, 2, 3, 4, 5});
  // Second half repeats the first with Alice shifted to {3,4,5}.
  for (int shift : {0, 3}) {
    const int k = shift == 0 ? 0 : 5;
    auto lab = [k](int i) { return "phi" + std::to_string(i + k); };
    s.states.push_back(product_ket(s.space, {basis_vector(6, shift == 0 ? 0 : 3), b1}, lab(1)));
    s.states.push_back(product_ket(s.space, {basis_vector(6, shift == 0 ? 2 : 5), b2}, lab(2)));
    s.states.push_back(product_ket(s.space, {shift == 0 ? local_combo(6, {1, 2}, {1, -1}) : local_combo(6, {4, 5}, {1, -1}), b3}, lab(3)));
    s.states.push_back(product_ket(s.space, {local_combo(6, {shift, shift + 1}, {1, -1}), b4}, lab(4)));
    s.states.push_back(product_ket(s.space, {local_combo(6, {shift, shift + 1, shift + 2}), b5}, lab(5)));
  }
  return s;
}

StateSet s4() {
  const StateSet base = s3();
  StateSet s;
  s.space = PartySpace({6, 6, 2}, {{}, {2, 3}, {}});
  s.name = "s4";
  for (int c : {0, 1}) {
    for (const auto& k : base.states) {
      s.states.push_back({s.space, kron(k.amplitudes, basis_vector(2, c)), k.label + "|" + std::to_string(c)});
    }
  }
  return s;
}

StateSet s5() {
  const int d = 4;
  StateSet s;
  s.space = PartySpace({d, d});
  s.name = "s5";
  auto e = [](int i) { return basis_vector(4, i); };
  for (double sg : {1.0, -1.0}) {
    s.states.push_back(superpose(s.space, {e(0), dom(d, 0, 1, sg)}, {e(2), dom(d, 2, 3, sg)}, "W0_01,23" + sign_char(sg)));
  }
  for (double sg : {1.0, -1.0}) s.states.push_back(product_ket(s.space, {e(0), dom(d, 2, 3, sg)}, "0|X23" + sign_char(sg)));
  s.states.push_back(superpose(s.space, {dom(d, 1, 2, 1), e(0)}, {e(3), e(2)}, "Wb0_12,3+"));
  s.states.push_back(product_ket(s.space, {dom(d, 1, 2, -1), e(0)}, "xi12-|0"));
  s.states.push_back(product_ket(s.space, {e(3), e(0)}, "3|0"));
  s.states.push_back(superpose(s.space, {e(1), dom(d, 1, 2, 1)}, {e(3), e(3)}, "W1_12,3+"));
  s.states.push_back(product_ket(s.space, {e(1), dom(d, 1, 2, -1)}, "1|X12-"));
  s.states.push_back(product_ket(s.space, {e(1), e(3)}, "1|3"));
  for (double sg : {1.0, -1.0}) s.states.push_back(product_ket(s.space, {dom(d, 2, 3, sg), e(1)}, "xi23" + sign_char(sg) + "|1"));
  return s;
}

StateSet s6(Variant v) {
  const int d = 6;
  StateSet s;
  s.space = PartySpace({d, d});
  s.name = "s6";
  auto e = [](int i) { return basis_vector(6, i); };
  auto prod = [&](Locals l, std::string label) { s.states.push_back(product_ket(s.space, std::move(l), std::move(label))); };
  auto sup = [&](Locals a, Locals b, std::string label) { s.states.push_back(superpose(s.space, a, b, std::move(label))); };
  for (double sg : {1.0, -1.0}) sup({e(0), dom(d, 0, 1, sg)}, {e(2), dom(d, 2, 3, sg)}, "W0_01,23" + sign_char(sg));
  for (double sg : {1.0, -1.0}) sup({e(0), dom(d, 2, 3, sg)}, {e(2), dom(d, 4, 5, sg)}, "W0_23,45" + sign_char(sg));
  for (double sg : {1.0, -1.0}) prod({e(0), dom(d, 4, 5, sg)}, "0|X45" + sign_char(sg));
  for (double sg : {1.0, -1.0}) sup({dom(d, 1, 2, sg), e(0)}, {dom(d, 3, 4, sg), e(2)}, "Wb0_12,34" + sign_char(sg));
  sup({dom(d, 3, 4, 1), e(0)}, {e(5), e(2)}, "Wb0_34,5+");
  prod({dom(d, 3, 4, -1), e(0)}, "xi34-|0");
  prod({e(5), e(0)}, "5|0");
  for (double sg : {1.0, -1.0}) sup({e(1), dom(d, 1, 2, sg)}, {e(3), dom(d, 3, 4, sg)}, "W1_12,34" + sign_char(sg));
  sup({e(1), dom(d, 3, 4, 1)}, {e(3), e(5)}, "W1_34,5+");
  prod({e(1), dom(d, 3, 4, -1)}, "1|X34-");
  prod({e(1), e(5)}, "1|5");
  for (double sg : {1.0, -1.0}) sup({dom(d, 2, 3, sg), e(1)}, {dom(d, 4, 5, sg), e(3)}, "Wb1_23,45" + sign_char(sg));
  const int col = v == Variant::Corrected ? 1 : 0;
  for (double sg : {1.0, -1.0}) prod({dom(d, 4, 5, sg), e(col)}, "xi45" + sign_char(sg) + "|" + std::to_string(col));
  for (double sg : {1.0, -1.0}) prod({e(4), dom(d, 4, 5, sg)}, "4|X45" + sign_char(sg));
  prod({e(5), e(4)}, "5|4");
  prod({e(5), e(5)}, "5|5");
  if (v == Variant::Verbatim) s.name = "s6-verbatim";
  return s;
}

StateSet tiles33() {
  StateSet s;
  s.space = PartySpace({3, 3});
  s.name = "tiles33";
  auto e = [](int i) { return basis_vector(3, i); };
  auto c = [](int i, int j) { return local_combo(3, {i, j}, {1, -1}); };
  s.states.push_back(product_ket(s.space, {e(0), c(0, 1)}, "0|0-1"));
  s.states.push_back(product_ket(s.space, {e(2), c(1, 2)}, "2|1-2"));
  s.states.push_back(product_ket(s.space, {c(1, 2), e(0)}, "1-2|0"));
  s.states.push_back(product_ket(s.space, {c(0, 1), e(2)}, "0-1|2"));
  s.states.push_back(product_ket(s.space, {local_combo(3, {0, 1, 2}), local_combo(3, {0, 1, 2})}, "stopper"));
  return s;
}

std::string notes_for(const std::string& name, Variant v) {
  if (name == "s1") return "party-subscript typos in the printed listing do not change amplitudes";
  if (name == "s2") return "xi_k and |k> are read as the same local basis vector";
  if (name == "s3") return "party B carries the 2 x 3 sub-split |b> = |b1 b2>, b = 3 b1 + b2";
  if (name == "s4") return "s3 tensored with |0>_C and |1>_C; first ten states carry |0>_C";
  if (name == "s5") return "W-type states stored normalized";
  if (name == "s6") {
    return v == Variant::Corrected ? "xi45+- placed in column |1>_B; the printed column |0>_B breaks orthogonality"
                                   : "printed listing reproduced literally; fails the orthogonality check";
  }
  if (name == "tiles33") return "3 x 3 Tiles UPB";
  if (name == "s1_general") return "layered domino tiling; s1_general(4) equals s1";
  return {};
}

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::Corrected ? "corrected" : "verbatim"; }

Variant parse_variant(std::string_view text) {
  if (text == "corrected") return Variant::Corrected;
  if (text == "verbatim") return Variant::Verbatim;
  throw Error(ErrorCode::UnknownName, "unknown fixture variant '" + std::string(text) + "'");
}

CVector basis_vector(int d, int i) {
  if (i < 0 || i >= d) throw Error(ErrorCode::Dimension, "basis index out of range");
  CVector v = CVector::Zero(d);
  v(i) = 1.0;
  return v;
}

CVector local_combo(int d, const std::vector<int>& indices, const std::vector<double>& signs) {
  CVector v = CVector::Zero(d);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= d) throw Error(ErrorCode::Dimension, "basis index out of range");
    v(indices[k]) += signs.empty() ? 1.0 : signs[k];
  }
  return v;
}

std::vector<std::string> fixture_names() { return {"s1", "s2", "s3", "s4", "s5", "s6", "tiles33", "s1_general"}; }

FixtureDescriptor describe_fixture(std::string_view name, Variant variant) {
  FixtureDescriptor desc;
  desc.variant = variant;
  const auto paren = name.find('(');
  if (paren != std::string_view::npos) {
    if (name.back() != ')') throw Error(ErrorCode::UnknownName, "malformed fixture name '" + std::string(name) + "'");
    const auto arg = name.substr(paren + 1, name.size() - paren - 2);
    int d = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), d);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
      throw Error(ErrorCode::UnknownName, "bad fixture parameter in '" + std::string(name) + "'");
    }
    desc.d = d;
    name = name.substr(0, paren);
  }
  desc.name = std::string(name);
  bool known = false;
  for (const auto& n : fixture_names()) known = known || n == desc.name;
  if (!known) throw Error(ErrorCode::UnknownName, "unknown fixture '" + desc.name + "'");
  desc.notes = notes_for(desc.name, variant);
  return desc;
}

StateSet build_fixture(const FixtureDescriptor& desc) {
  const auto& n = desc.name;
  if (n == "s1") return s1_general(4);
  if (n == "s1_general") return s1_general(desc.d);
  if (n == "s2") return s2();
  if (n == "s3") return s3();
  if (n == "s4") return s4();
  if (n == "s5") return s5();
  if (n == "s6") return s6(desc.variant);
  if (n == "tiles33") return tiles33();
  throw Error(ErrorCode::UnknownName, "unknown fixture '" + n + "'");
}

StateSet build_fixture(std::string_view name, Variant variant) { return build_fixture(describe_fixture(name, variant)); }

std::vector<Correction> fixture_corrections(std::string_view name) {
  const auto desc = describe_fixture(name);
  if (desc.name == "s1") {
    return {
        {"|xi3>_A|0>_A", "|xi3>_A|0>_B", "second ket labeled A; the tiling places it in Bob's column 0"},
        {"|xi23+->_A|1>_A", "|xi23+->_A|1>_B", "second ket labeled A; the tiling places it in Bob's column 1"},
    };
  }
  if (desc.name == "s6") {
    return {
        {"|xi5>_A|0>_A", "|xi5>_A|0>_B", "second ket labeled A; Bob's column 0"},
        {"|xi5>_A|4>_A", "|xi5>_A|4>_B", "second ket labeled A; Bob's column 4"},
        {"|xi45+->_A|0>_B", "|xi45+->_A|1>_B",
         "column 0 overlaps |xi5>|0>, |xi34->|0> and the Wb0_34,5+ state; column 1 is the free slot of the layered "
         "tiling and is orthogonal to Wb1_23,45+- and every other member"},
    };
  }
  return {};
}

}  // namespace qlocc
