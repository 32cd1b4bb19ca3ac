#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlocc/state.hpp"

namespace qlocc {

enum class TileKind { Square, Domino, Larger };
std::string_view to_string(TileKind k);

// Closed index interval [first, last].
struct IndexRange {
  int first = 0;
  int last = 0;
  int size() const { return last - first + 1; }
  bool contains(int i) const { return first <= i && i <= last; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
  friend auto operator<=>(const IndexRange&, const IndexRange&) = default;
};

struct Tile {
  IndexRange a_range;
  IndexRange b_range;
  std::vector<std::string> members;
  std::vector<std::size_t> member_indices;  // positions in the set, 0-based
  TileKind kind = TileKind::Square;
  int link = -1;  // shared by the rectangles of one entangled state in paired mode
};

// Display order of each party's basis: order[p][position] = basis index.
using LocalOrder = std::array<std::vector<int>, 2>;

// Groups states by identical rectangular support. Without paired mode every
// state must have contiguous A- and B-supports; with it, a state whose
// coefficient rows split into groups with distinct B-supports becomes one
// linked rectangle per group. Ranges are positions under `order` when
// given. Throws NonContiguous naming the state.
std::vector<Tile> extract_tiles(const StateSet& s, bool paired = false, const std::optional<LocalOrder>& order = {});

// Two-outcome split of one party's basis indices, drawn as an outline.
struct Overlay {
  int party = 1;
  std::vector<int> first;  // indices of the first outcome; the rest form the second
  std::vector<std::string> labels{"1", "2"};
};

// Split from a projector that is diagonal in the computational basis.
Overlay overlay_from_projector(int party, const CMatrix& projector, std::vector<std::string> labels = {"1", "2"});

// Lexicographically first basis reordering (local dimensions up to 8) that
// makes every support contiguous; overlay blocks are kept contiguous too
// when possible.
std::optional<LocalOrder> contiguous_order(const StateSet& s, bool paired = false,
                                           const std::optional<Overlay>& overlay = {});

enum class RenderFormat { Ascii, Svg };
RenderFormat parse_render_format(std::string_view text);

struct RenderOptions {
  RenderFormat format = RenderFormat::Ascii;
  bool paired = true;
  bool reorder = false;  // fall back to contiguous_order when the natural order fails
  std::optional<Overlay> overlay;
};

std::string render(const StateSet& s, const RenderOptions& opt = {});

}  // namespace qlocc
