#include "qlocc/render.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>

namespace qlocc {
namespace {

constexpr double kSupportTolerance = 1e-9;
constexpr int kMaxReorderDim = 8;

CMatrix coefficients(const Ket& k) {
  const int da = k.space.dim(0), db = k.space.dim(1);
  CMatrix m(da, db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < db; ++j) m(i, j) = k.amplitudes(static_cast<Eigen::Index>(i) * db + j);
  }
  return m;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (int x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
  return out;
}

// Rectangles of one state in basis indices; more than one only for an
// entangled state in paired mode.
struct Piece {
  std::vector<int> rows;
  std::vector<int> cols;
};

std::vector<Piece> pieces_of(const Ket& k, bool paired, bool& linked) {
  const CMatrix m = coefficients(k);
  const double tol = kSupportTolerance * std::max(1.0, max_abs(m));
  Piece whole;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.row(r).cwiseAbs().maxCoeff() > tol) whole.rows.push_back(static_cast<int>(r));
  }
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (m.col(c).cwiseAbs().maxCoeff() > tol) whole.cols.push_back(static_cast<int>(c));
  }
  linked = paired && schmidt_rank(k, {{0}, {1}}) > 1;
  if (!linked) return {whole};
  std::map<std::vector<int>, std::vector<int>> groups;  // B-support -> rows
  for (int r : whole.rows) {
    std::vector<int> support;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) > tol) support.push_back(static_cast<int>(c));
    }
    groups[support].push_back(r);
  }
  std::vector<Piece> out;
  for (const auto& [cols, rows] : groups) out.push_back({rows, cols});
  return out;
}

std::vector<int> identity_order(int d) {
  std::vector<int> v(d);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<int> inverse(const std::vector<int>& order) {
  std::vector<int> inv(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) inv[order[p]] = static_cast<int>(p);
  return inv;
}

// Positions of a set of basis indices as a range, if contiguous.
std::optional<IndexRange> positions(const std::vector<int>& idx, const std::vector<int>& inv) {
  if (idx.empty()) return std::nullopt;
  std::vector<int> pos;
  for (int i : idx) pos.push_back(inv[i]);
  std::sort(pos.begin(), pos.end());
  if (pos.back() - pos.front() + 1 != static_cast<int>(pos.size())) return std::nullopt;
  return IndexRange{pos.front(), pos.back()};
}

TileKind kind_of(const IndexRange& a, const IndexRange& b) {
  const int cells = a.size() * b.size();
  if (cells == 1) return TileKind::Square;
  if (cells == 2) return TileKind::Domino;
  return TileKind::Larger;
}

std::string tile_label(const Tile& t) {
  std::string out;
  for (std::size_t i : t.member_indices) out += (out.empty() ? "" : ",") + std::to_string(i + 1);
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

constexpr std::array<const char*, 10> kPalette{"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3",
                                               "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#ccebc5"};

struct Layout {
  const StateSet& s;
  const std::vector<Tile>& tiles;
  LocalOrder order;
  const RenderOptions& opt;

  int dim(int p) const { return s.space.dim(p); }
  // Overlay outcome of the basis index shown at a position.
  bool first_at(int pos) const {
    const auto& f = opt.overlay->first;
    return std::find(f.begin(), f.end(), order[opt.overlay->party][pos]) != f.end();
  }
  // "1", "2" or "1+2": which overlay blocks a tile meets; the member list without overlay.
  std::string membership(const Tile& t) const {
    if (!opt.overlay) return tile_label(t);
    const IndexRange& r = opt.overlay->party == 0 ? t.a_range : t.b_range;
    bool in = false, out = false;
    for (int i = r.first; i <= r.last; ++i) (first_at(i) ? in : out) = true;
    return in && out ? "1+2" : in ? "1" : "2";
  }
  bool natural_order() const { return order[0] == identity_order(dim(0)) && order[1] == identity_order(dim(1)); }
};

std::string render_ascii(const Layout& l) {
  const int da = l.dim(0), db = l.dim(1);
  const auto& tiles = l.tiles;
  constexpr int kCell = 5;
  // Cell owners as tile-id lists; borders go where owner lists differ.
  std::vector<std::vector<std::vector<int>>> owner(da, std::vector<std::vector<int>>(db));
  std::map<std::pair<int, int>, std::string> corner_labels;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    for (int a = tiles[t].a_range.first; a <= tiles[t].a_range.last; ++a) {
      for (int b = tiles[t].b_range.first; b <= tiles[t].b_range.last; ++b) owner[a][b].push_back(static_cast<int>(t));
    }
    std::string& cl = corner_labels[{tiles[t].a_range.first, tiles[t].b_range.first}];
    cl += (cl.empty() ? "" : "/") + std::string(tiles[t].link >= 0 ? "~" : "") + tile_label(tiles[t]);
  }
  const int rows = 2 * da + 1, cols = kCell * db + 1;
  std::vector<std::string> canvas(rows, std::string(cols, ' '));
  auto differs = [&](int a1, int b1, int a2, int b2) {
    const bool in1 = a1 >= 0 && a1 < da && b1 >= 0 && b1 < db;
    const bool in2 = a2 >= 0 && a2 < da && b2 >= 0 && b2 < db;
    if (in1 != in2) return true;
    if (!in1) return false;
    return owner[a1][b1] != owner[a2][b2];
  };
  for (int a = 0; a <= da; ++a) {
    for (int b = 0; b < db; ++b) {
      if (differs(a - 1, b, a, b)) {
        for (int x = 1; x < kCell; ++x) canvas[2 * a][kCell * b + x] = '-';
      }
    }
  }
  for (int a = 0; a < da; ++a) {
    for (int b = 0; b <= db; ++b) {
      if (differs(a, b - 1, a, b)) canvas[2 * a + 1][kCell * b] = '|';
    }
  }
  for (int a = 0; a <= da; ++a) {
    for (int b = 0; b <= db; ++b) {
      const bool up = a > 0 && canvas[2 * a - 1][kCell * b] == '|';
      const bool down = a < da && canvas[2 * a + 1][kCell * b] == '|';
      const bool left = b > 0 && canvas[2 * a][kCell * b - 1] == '-';
      const bool right = b < db && canvas[2 * a][kCell * b + 1] == '-';
      if (up || down || left || right) canvas[2 * a][kCell * b] = '+';
    }
  }
  for (auto [cell, label] : corner_labels) {
    const auto [a, b] = cell;
    int room = 0;
    while (b * kCell + 1 + room < cols && canvas[2 * a + 1][b * kCell + 1 + room] != '|') ++room;
    if (static_cast<int>(label.size()) > room) label = label.substr(0, static_cast<std::size_t>(room - 1)) + "*";
    canvas[2 * a + 1].replace(static_cast<std::size_t>(b * kCell + 1), label.size(), label);
  }

  const bool row_marks = l.opt.overlay && l.opt.overlay->party == 0;
  const std::string gutter(row_marks ? 8 : 4, ' ');
  std::string out = l.s.name.empty() ? "set" : l.s.name;
  out += ": " + std::to_string(da) + "x" + std::to_string(db) + " grid, rows A, columns B, " +
         std::to_string(tiles.size()) + " tiles\n";
  std::string header = gutter;
  char buf[32];
  for (int b = 0; b < db; ++b) {
    std::snprintf(buf, sizeof buf, "%*d", kCell, l.order[1][b]);
    header += buf;
  }
  out += header + "\n";
  if (l.opt.overlay && l.opt.overlay->party == 1) {
    std::string marks = gutter;
    for (int b = 0; b < db; ++b) {
      const std::string& lab = l.opt.overlay->labels[l.first_at(b) ? 0 : 1];
      std::snprintf(buf, sizeof buf, "%*s", kCell, lab.substr(0, kCell - 1).c_str());
      marks += buf;
    }
    out += marks + "\n";
  }
  for (int r = 0; r < rows; ++r) {
    std::string prefix = "    ";
    if (r % 2 == 1) {
      std::snprintf(buf, sizeof buf, "%3d ", l.order[0][r / 2]);
      prefix = buf;
    }
    if (row_marks) {
      const std::string mark = r % 2 == 1 ? l.opt.overlay->labels[l.first_at(r / 2) ? 0 : 1].substr(0, 3) : "";
      prefix = mark + std::string(4 - mark.size(), ' ') + prefix;
    }
    std::string line = prefix + canvas[r];
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  if (!l.natural_order()) out += "axis order: A " + join(l.order[0]) + "; B " + join(l.order[1]) + "\n";
  out += "tiles:\n";
  for (const auto& t : tiles) {
    out += "  [" + tile_label(t) + "] rows " + std::to_string(t.a_range.first) + ".." + std::to_string(t.a_range.last) +
           " cols " + std::to_string(t.b_range.first) + ".." + std::to_string(t.b_range.last) + " " +
           std::string(to_string(t.kind));
    if (t.link >= 0) out += " linked#" + std::to_string(t.link);
    out += ":";
    for (const auto& m : t.members) out += " " + m;
    out += "\n";
  }
  if (l.opt.overlay) {
    const Overlay& ov = *l.opt.overlay;
    std::vector<int> rest;
    for (int i = 0; i < l.dim(ov.party); ++i) {
      if (std::find(ov.first.begin(), ov.first.end(), i) == ov.first.end()) rest.push_back(i);
    }
    out += "overlay: party " + std::string(1, static_cast<char>('A' + ov.party)) + " " + ov.labels[0] + " = {" +
           join(ov.first) + "}, " + ov.labels[1] + " = {" + join(rest) + "}\n";
  }
  return out;
}

std::string render_svg(const Layout& l) {
  const int da = l.dim(0), db = l.dim(1);
  const auto& tiles = l.tiles;
  constexpr int kCell = 48, kMargin = 40;
  const int width = 2 * kMargin + kCell * db, height = 2 * kMargin + kCell * da;
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n", width,
                height, width, height);
  out += buf;
  out += "<title>" + escape_xml(l.s.name.empty() ? "set" : l.s.name) + "</title>\n";
  out += "<g id=\"grid\" stroke=\"#bbbbbb\" stroke-width=\"1\">\n";
  for (int a = 0; a <= da; ++a) {
    std::snprintf(buf, sizeof buf, "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\"/>\n", kMargin, kMargin + a * kCell,
                  kMargin + db * kCell, kMargin + a * kCell);
    out += buf;
  }
  for (int b = 0; b <= db; ++b) {
    std::snprintf(buf, sizeof buf, "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\"/>\n", kMargin + b * kCell, kMargin,
                  kMargin + b * kCell, kMargin + da * kCell);
    out += buf;
  }
  out += "</g>\n<g id=\"axes\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">\n";
  for (int b = 0; b < db; ++b) {
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\">%d</text>\n", kMargin + b * kCell + kCell / 2,
                  kMargin - 8, l.order[1][b]);
    out += buf;
  }
  for (int a = 0; a < da; ++a) {
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\">%d</text>\n", kMargin - 12,
                  kMargin + a * kCell + kCell / 2 + 4, l.order[0][a]);
    out += buf;
  }
  out += "</g>\n<g id=\"tiles\" font-family=\"monospace\" font-size=\"11\">\n";
  std::map<int, std::vector<std::size_t>> links;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const Tile& tile = tiles[t];
    if (tile.link >= 0) links[tile.link].push_back(t);
    const char* color = kPalette[fnv1a(l.membership(tile)) % kPalette.size()];
    const int x = kMargin + tile.b_range.first * kCell + 3, y = kMargin + tile.a_range.first * kCell + 3;
    const int w = tile.b_range.size() * kCell - 6, h = tile.a_range.size() * kCell - 6;
    std::snprintf(buf, sizeof buf,
                  "<rect class=\"tile %s\" x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" rx=\"4\" fill=\"%s\" "
                  "fill-opacity=\"0.8\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n",
                  std::string(to_string(tile.kind)).c_str(), x, y, w, h, color);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\">%s</text>\n", x + 4, y + 14,
                  escape_xml(tile_label(tile)).c_str());
    out += buf;
  }
  out += "</g>\n";
  if (!links.empty()) {
    out += "<g id=\"links\" stroke=\"#333333\" stroke-width=\"2\">\n";
    auto cx = [](const Tile& t) { return kMargin + (t.b_range.first * 2 + t.b_range.size()) * kCell / 2; };
    auto cy = [](const Tile& t) { return kMargin + (t.a_range.first * 2 + t.a_range.size()) * kCell / 2; };
    for (const auto& [id, members] : links) {
      for (std::size_t i = 1; i < members.size(); ++i) {
        const Tile& p = tiles[members[i - 1]];
        const Tile& q = tiles[members[i]];
        std::snprintf(buf, sizeof buf, "<line class=\"link\" x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\"/>\n", cx(p), cy(p),
                      cx(q), cy(q));
        out += buf;
      }
    }
    out += "</g>\n";
  }
  if (l.opt.overlay) {
    const Overlay& ov = *l.opt.overlay;
    out += "<g id=\"overlay\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"3\" stroke-dasharray=\"8 4\" "
           "font-family=\"monospace\" font-size=\"13\">\n";
    const int n = l.dim(ov.party);
    // One outline per maximal run of positions with the same outcome.
    for (int i = 0; i < n;) {
      const bool first = l.first_at(i);
      int j = i;
      while (j + 1 < n && l.first_at(j + 1) == first) ++j;
      const std::string& label = ov.labels[first ? 0 : 1];
      int x, y, w, h;
      if (ov.party == 1) {
        x = kMargin + i * kCell, y = kMargin, w = (j - i + 1) * kCell, h = da * kCell;
      } else {
        x = kMargin, y = kMargin + i * kCell, w = db * kCell, h = (j - i + 1) * kCell;
      }
      std::snprintf(buf, sizeof buf,
                    "<rect class=\"overlay\" data-outcome=\"%s\" x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\"/>\n",
                    escape_xml(label).c_str(), x, y, w, h);
      out += buf;
      std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\" stroke=\"none\" fill=\"#d62728\">%s</text>\n",
                    ov.party == 1 ? x + w / 2 - 10 : width - kMargin + 4,
                    ov.party == 1 ? height - kMargin + 18 : y + h / 2, escape_xml(label).c_str());
      out += buf;
      i = j + 1;
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

// First permutation of 0..d-1 under which every set is contiguous.
std::optional<std::vector<int>> first_contiguous_permutation(int d, const std::vector<std::vector<int>>& sets) {
  std::vector<int> perm = identity_order(d);
  do {
    const auto inv = inverse(perm);
    bool ok = true;
    for (const auto& st : sets) {
      if (!positions(st, inv)) {
        ok = false;
        break;
      }
    }
    if (ok) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

}  // namespace

std::string_view to_string(TileKind k) {
  switch (k) {
    case TileKind::Square: return "square";
    case TileKind::Domino: return "domino";
    case TileKind::Larger: return "larger";
  }
  return "?";
}

std::vector<Tile> extract_tiles(const StateSet& s, bool paired, const std::optional<LocalOrder>& order) {
  if (s.space.parties() != 2) throw Error(ErrorCode::InvalidArgument, "tiling needs a bipartite set");
  const LocalOrder ord = order ? *order : LocalOrder{identity_order(s.space.dim(0)), identity_order(s.space.dim(1))};
  for (int p : {0, 1}) {
    std::vector<int> sorted = ord[p];
    std::sort(sorted.begin(), sorted.end());
    if (sorted != identity_order(s.space.dim(p))) throw Error(ErrorCode::InvalidArgument, "order is not a permutation");
  }
  const std::array<std::vector<int>, 2> inv{inverse(ord[0]), inverse(ord[1])};
  std::vector<Tile> plain, linked;
  std::map<std::pair<IndexRange, IndexRange>, std::size_t> slot;
  int next_link = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Ket& k = s.states[i];
    bool is_linked = false;
    std::vector<Tile> pieces;
    for (const auto& pc : pieces_of(k, paired, is_linked)) {
      const auto ra = positions(pc.rows, inv[0]), rb = positions(pc.cols, inv[1]);
      if (!ra || !rb) {
        throw Error(ErrorCode::NonContiguous, "state " + k.label + (is_linked ? " has a piece" : " has") +
                                                  " with A-support {" + join(pc.rows) + "} and B-support {" +
                                                  join(pc.cols) + "}, not a contiguous rectangle");
      }
      pieces.push_back(Tile{*ra, *rb, {k.label}, {i}, kind_of(*ra, *rb), is_linked ? next_link : -1});
    }
    if (!is_linked) {
      const Tile& t = pieces.front();
      auto [it, fresh] = slot.try_emplace({t.a_range, t.b_range}, plain.size());
      if (fresh) {
        plain.push_back(t);
      } else {
        plain[it->second].members.push_back(k.label);
        plain[it->second].member_indices.push_back(i);
      }
      continue;
    }
    std::sort(pieces.begin(), pieces.end(), [](const Tile& x, const Tile& y) {
      return std::tie(x.a_range, x.b_range) < std::tie(y.a_range, y.b_range);
    });
    ++next_link;
    linked.insert(linked.end(), pieces.begin(), pieces.end());
  }
  plain.insert(plain.end(), linked.begin(), linked.end());
  return plain;
}

std::optional<LocalOrder> contiguous_order(const StateSet& s, bool paired, const std::optional<Overlay>& overlay) {
  if (s.space.parties() != 2) throw Error(ErrorCode::InvalidArgument, "tiling needs a bipartite set");
  std::array<std::vector<std::vector<int>>, 2> sets;
  for (const auto& k : s.states) {
    bool is_linked = false;
    for (const auto& pc : pieces_of(k, paired, is_linked)) {
      sets[0].push_back(pc.rows);
      sets[1].push_back(pc.cols);
    }
  }
  LocalOrder out;
  for (int p : {0, 1}) {
    const int d = s.space.dim(p);
    if (d > kMaxReorderDim) return std::nullopt;
    std::optional<std::vector<int>> perm;
    if (overlay && overlay->party == p && !overlay->first.empty() && static_cast<int>(overlay->first.size()) < d) {
      auto with = sets[p];
      with.push_back(overlay->first);
      perm = first_contiguous_permutation(d, with);
    }
    if (!perm) perm = first_contiguous_permutation(d, sets[p]);
    if (!perm) return std::nullopt;
    out[p] = std::move(*perm);
  }
  return out;
}

Overlay overlay_from_projector(int party, const CMatrix& projector, std::vector<std::string> labels) {
  if (labels.size() != 2) throw Error(ErrorCode::InvalidArgument, "overlay needs two labels");
  CMatrix off = projector;
  off.diagonal().setZero();
  if (max_abs(off) > kSupportTolerance) {
    throw Error(ErrorCode::InvalidArgument, "overlay projector is not diagonal in the computational basis");
  }
  Overlay ov;
  ov.party = party;
  ov.labels = std::move(labels);
  for (Eigen::Index i = 0; i < projector.rows(); ++i) {
    if (projector(i, i).real() > 0.5) ov.first.push_back(static_cast<int>(i));
  }
  return ov;
}

RenderFormat parse_render_format(std::string_view text) {
  if (text == "ascii") return RenderFormat::Ascii;
  if (text == "svg") return RenderFormat::Svg;
  throw Error(ErrorCode::InvalidArgument, "format must be ascii or svg, got '" + std::string(text) + "'");
}

std::string render(const StateSet& s, const RenderOptions& opt) {
  if (s.space.parties() != 2) throw Error(ErrorCode::InvalidArgument, "tiling needs a bipartite set");
  if (opt.overlay) {
    if (opt.overlay->party < 0 || opt.overlay->party > 1) throw Error(ErrorCode::InvalidArgument, "overlay party must be 0 or 1");
    for (int i : opt.overlay->first) {
      if (i < 0 || i >= s.space.dim(opt.overlay->party)) throw Error(ErrorCode::InvalidArgument, "overlay index out of range");
    }
  }
  LocalOrder order{identity_order(s.space.dim(0)), identity_order(s.space.dim(1))};
  std::vector<Tile> tiles;
  try {
    tiles = extract_tiles(s, opt.paired);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonContiguous || !opt.reorder) throw;
    auto found = contiguous_order(s, opt.paired, opt.overlay);
    if (!found) throw;
    order = std::move(*found);
    tiles = extract_tiles(s, opt.paired, order);
  }
  const Layout layout{s, tiles, order, opt};
  return opt.format == RenderFormat::Svg ? render_svg(layout) : render_ascii(layout);
}

}  // namespace qlocc
