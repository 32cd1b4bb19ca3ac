#include <gtest/gtest.h>

#include "qlocc/fixtures.hpp"
#include "qlocc/protocol.hpp"
#include "qlocc/render.hpp"

using namespace qlocc;

namespace {

// Cell multiplicities of a tiling.
std::vector<std::vector<int>> coverage(const std::vector<Tile>& tiles, int da, int db) {
  std::vector<std::vector<int>> c(da, std::vector<int>(db, 0));
  for (const auto& t : tiles)
    for (int a = t.a_range.first; a <= t.a_range.last; ++a)
      for (int b = t.b_range.first; b <= t.b_range.last; ++b) ++c[a][b];
  return c;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Tiles, S1PartitionsGrid) {
  const auto tiles = extract_tiles(build_fixture("s1"));
  EXPECT_EQ(tiles.size(), 10u);
  for (const auto& row : coverage(tiles, 4, 4))
    for (int c : row) EXPECT_EQ(c, 1);
  int dominoes = 0;
  for (const auto& t : tiles) dominoes += t.kind == TileKind::Domino;
  EXPECT_GT(dominoes, 0);
}

TEST(Tiles, TilesStopperCoversGrid) {
  const auto tiles = extract_tiles(build_fixture("tiles33"));
  ASSERT_EQ(tiles.size(), 5u);
  const auto& stop = tiles[4];
  EXPECT_EQ(stop.a_range, (IndexRange{0, 2}));
  EXPECT_EQ(stop.b_range, (IndexRange{0, 2}));
  EXPECT_EQ(stop.kind, TileKind::Larger);
  EXPECT_EQ(stop.member_indices, (std::vector<std::size_t>{4}));
}

TEST(Tiles, SingleStateFullGrid) {
  StateSet s;
  s.space = PartySpace({2, 3});
  s.states = {product_ket(s.space, {CVector::Ones(2), CVector::Ones(3)}, "u")};
  const auto tiles = extract_tiles(s);
  ASSERT_EQ(tiles.size(), 1u);
  EXPECT_EQ(tiles[0].a_range, (IndexRange{0, 1}));
  EXPECT_EQ(tiles[0].b_range, (IndexRange{0, 2}));
}

TEST(Tiles, EntangledNeedsPairedMode) {
  const auto s5 = build_fixture("s5");
  EXPECT_THROW(extract_tiles(s5, false), Error);
  const auto tiles = extract_tiles(s5, true);
  int linked = 0;
  for (const auto& t : tiles) linked += t.link >= 0;
  EXPECT_GT(linked, 0);
  RenderOptions opt;
  opt.paired = false;
  EXPECT_THROW(render(s5, opt), Error);
}

TEST(Tiles, NonContiguousNamesState) {
  try {
    extract_tiles(build_fixture("s3"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonContiguous);
    EXPECT_NE(std::string(e.what()).find("phi1"), std::string::npos);
  }
}

TEST(Tiles, ContiguousOrderForS3) {
  const auto s = build_fixture("s3");
  const auto order = contiguous_order(s);
  ASSERT_TRUE(order.has_value());
  EXPECT_EQ((*order)[0], (std::vector<int>{0, 1, 2, 3, 4, 5}));
  const auto tiles = extract_tiles(s, false, order);
  EXPECT_EQ(tiles.size(), 10u);
  // phi5 and phi10 cover their halves on top of the smaller tiles.
  for (const auto& row : coverage(tiles, 6, 6))
    for (int c : row) EXPECT_GE(c, 1);
}

TEST(Render, AsciiDeterministic) {
  const auto s = build_fixture("s1");
  const auto a = render(s);
  EXPECT_EQ(a, render(s));
  EXPECT_NE(a.find("10 tiles"), std::string::npos);
}

TEST(Render, SvgWellFormedAndDeterministic) {
  const auto s = build_fixture("tiles33");
  RenderOptions opt;
  opt.format = RenderFormat::Svg;
  const auto svg = render(s, opt);
  EXPECT_EQ(svg, render(s, opt));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<rect class=\"tile"), 5u);
}

TEST(Render, S3Overlay) {
  const auto s = build_fixture("s3");
  const auto tree = builtin_protocol("s3_activation");
  const auto& root = tree.measure();
  RenderOptions opt;
  opt.reorder = true;
  opt.overlay = overlay_from_projector(root.party, root.kraus[0].adjoint() * root.kraus[0], root.labels);
  EXPECT_EQ(opt.overlay->first, (std::vector<int>{0, 1, 2}));
  const auto ascii = render(s, opt);
  EXPECT_NE(ascii.find("overlay: party B K_B1 = {0,1,2}, K_B2 = {3,4,5}"), std::string::npos);
  opt.format = RenderFormat::Svg;
  const auto svg = render(s, opt);
  EXPECT_GE(count(svg, "class=\"overlay\" data-outcome=\"K_B1\""), 1u);
  EXPECT_GE(count(svg, "class=\"overlay\" data-outcome=\"K_B2\""), 1u);
}

TEST(Render, OverlayValidation) {
  CMatrix h = CMatrix::Constant(2, 2, 0.5);
  EXPECT_THROW(overlay_from_projector(0, h), Error);
  RenderOptions opt;
  opt.overlay = Overlay{1, {7}, {"x", "y"}};
  EXPECT_THROW(render(build_fixture("s1"), opt), Error);
  EXPECT_THROW(parse_render_format("png"), Error);
}
