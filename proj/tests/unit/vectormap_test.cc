#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "roadrecon/errors.h"
#include "roadrecon/surface/semantics.h"
#include "roadrecon/util/rng.h"
#include "roadrecon/vectormap/vector_map.h"
#include "unit/field_fixture.h"

namespace roadrecon {
namespace {

using testing::PlaneField;

BevRaster<uint8_t> Blank(int w, int h, double res = 0.1) {
  return {GrayImage(w, h, 0), 0.0, 0.0, res};
}

void Paint(BevRaster<uint8_t>* bev, int c0, int c1, int r0, int r1, uint8_t value) {
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) bev->cells.at(c, r) = value;
  }
}

// Textbook Zhang-Suen, written independently of the library: P2..P9 run
// clockwise from north, removal needs 2 <= B <= 6, A == 1 and the two
// sub-iteration products.
GrayImage OracleThin(const GrayImage& in) {
  GrayImage img = in;
  for (auto& v : img.data()) v = v ? 1 : 0;
  auto px = [&](int c, int r) { return static_cast<int>(img.get(c, r, 0)); };
  for (bool changed = true; changed;) {
    changed = false;
    for (int step = 0; step < 2; ++step) {
      std::vector<std::pair<int, int>> kill;
      for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
          if (!px(c, r)) continue;
          const int p[8] = {px(c, r - 1), px(c + 1, r - 1), px(c + 1, r), px(c + 1, r + 1),
                            px(c, r + 1), px(c - 1, r + 1), px(c - 1, r), px(c - 1, r - 1)};
          int b = 0, a = 0;
          for (int k = 0; k < 8; ++k) {
            b += p[k];
            a += p[k] == 0 && p[(k + 1) % 8] == 1;
          }
          const int p2 = p[0], p4 = p[2], p6 = p[4], p8 = p[6];
          const bool cond = step == 0 ? (p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0)
                                      : (p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0);
          if (b >= 2 && b <= 6 && a == 1 && cond) kill.emplace_back(c, r);
        }
      }
      for (auto [c, r] : kill) img.at(c, r) = 0;
      changed = changed || !kill.empty();
    }
  }
  return img;
}

TEST(ExtractPolylines, EmptyMaskGivesNothing) {
  EXPECT_TRUE(ExtractPolylines(Blank(20, 20), kLaneMarking, 0.05).empty());
}

TEST(ExtractPolylines, StraightStripeGivesCenterlineSegment) {
  auto bev = Blank(520, 20);
  Paint(&bev, 10, 509, 9, 11, kLaneMarking);  // 3 cells wide, 50 m long
  const auto els = ExtractPolylines(bev, kLaneMarking, 0.05);
  ASSERT_EQ(els.size(), 1u);
  ASSERT_EQ(els[0].points.size(), 2u);
  EXPECT_EQ(els[0].cls, ElementClass::kLaneDivider);
  const double center_y = bev.CellCenter(0, 10).y();
  for (const auto& p : els[0].points) EXPECT_LE(std::abs(p.y() - center_y), 0.1 + 1e-12);
  EXPECT_GT(std::abs(els[0].points[1].x() - els[0].points[0].x()), 49.0);
}

TEST(ExtractPolylines, LShapeKeepsCornerVertex) {
  auto bev = Blank(80, 80);
  Paint(&bev, 10, 60, 10, 12, kRoadTeeth);  // horizontal arm
  Paint(&bev, 58, 60, 10, 60, kRoadTeeth);  // vertical arm
  const auto els = ExtractPolylines(bev, kRoadTeeth, 0.05);
  ASSERT_EQ(els.size(), 1u);
  EXPECT_EQ(els[0].cls, ElementClass::kRoadBoundary);
  ASSERT_EQ(els[0].points.size(), 3u);
  const Eigen::Vector2d corner = bev.CellCenter(59, 11);
  EXPECT_LE((els[0].points[1].head<2>() - corner).norm(), 2 * 0.1 + 1e-12);
}

TEST(ExtractPolylines, VerticesLieOnOracleSkeleton) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto bev = Blank(60, 60);
    for (int k = 0; k < 6; ++k) {
      const int c = static_cast<int>(rng.UniformIndex(50)), r = static_cast<int>(rng.UniformIndex(50));
      const bool horizontal = rng.Bernoulli(0.5);
      const int len = 5 + static_cast<int>(rng.UniformIndex(20));
      if (horizontal) {
        Paint(&bev, c, std::min(59, c + len), r, std::min(59, r + 2), kLaneMarking);
      } else {
        Paint(&bev, c, std::min(59, c + 2), r, std::min(59, r + len), kLaneMarking);
      }
    }
    GrayImage mask(60, 60, 0);
    for (size_t i = 0; i < mask.data().size(); ++i) mask.data()[i] = bev.cells.data()[i] == kLaneMarking;
    const GrayImage oracle = OracleThin(mask);
    ASSERT_EQ(ZhangSuenThin(mask), oracle);
    ExtractOptions opt;
    opt.spur_length = 0.0;
    opt.extend_ends = false;
    for (const auto& e : ExtractPolylines(bev, kLaneMarking, 0.05, opt)) {
      for (const auto& p : e.points) {
        int c = 0, r = 0;
        ASSERT_TRUE(bev.CellOf(p.x(), p.y(), &c, &r));
        ASSERT_NE(oracle.at(c, r), 0) << c << "," << r;
      }
    }
  }
}

TEST(ExtractPolylines, ZeroToleranceKeepsEveryTracedCell) {
  auto bev = Blank(40, 20);
  Paint(&bev, 5, 30, 8, 10, kLaneMarking);
  GrayImage mask(40, 20, 0);
  for (size_t i = 0; i < mask.data().size(); ++i) mask.data()[i] = bev.cells.data()[i] != 0;
  const auto skeleton = ZhangSuenThin(mask);
  ExtractOptions opt;
  opt.extend_ends = false;
  const auto els = ExtractPolylines(bev, kLaneMarking, 0.0, opt);
  ASSERT_EQ(els.size(), 1u);
  EXPECT_EQ(els[0].points.size(), ForegroundPixels(skeleton).size());
  for (size_t i = 1; i < els[0].points.size(); ++i) {
    const double step = (els[0].points[i] - els[0].points[i - 1]).norm();
    EXPECT_LE(step, 0.1 * std::sqrt(2.0) + 1e-12);
  }
}

TEST(ExtractPolylines, FreeEndsReachTheStripEnds) {
  auto bev = Blank(40, 20);
  Paint(&bev, 5, 30, 8, 10, kLaneMarking);
  const auto els = ExtractPolylines(bev, kLaneMarking, 0.05);
  ASSERT_EQ(els.size(), 1u);
  const auto& pts = els[0].points;
  // Ends land on the outer edges of the end cells.
  const Eigen::Vector2d half(0.5 * bev.resolution, 0.0);
  const Eigen::Vector2d a = bev.CellCenter(5, 9) - half, b = bev.CellCenter(30, 9) + half;
  const Eigen::Vector2d front = pts.front().head<2>(), back = pts.back().head<2>();
  // Either direction of travel is fine.
  const bool forward = (front - a).norm() < (front - b).norm();
  EXPECT_LT((front - (forward ? a : b)).norm(), 1e-9);
  EXPECT_LT((back - (forward ? b : a)).norm(), 1e-9);

  // Without extension the skeleton stops short of the strip ends.
  ExtractOptions opt;
  opt.extend_ends = false;
  const auto raw = ExtractPolylines(bev, kLaneMarking, 0.05, opt);
  ASSERT_EQ(raw.size(), 1u);
  EXPECT_LT((raw[0].points.back() - raw[0].points.front()).norm(), (b - a).norm() - 0.05);
}

TEST(ExtractPolylines, ExtendedEndsStayInsideTheClassAndTheCap) {
  auto bev = Blank(80, 80);
  // Thick diagonal band.
  for (int r = 0; r < 80; ++r) {
    for (int c = 0; c < 80; ++c) {
      if (std::abs(c - r) <= 1 && c >= 10 && c <= 60) bev.cells.at(c, r) = kLaneMarking;
    }
  }
  ExtractOptions with, without;
  without.extend_ends = false;
  const auto a = ExtractPolylines(bev, kLaneMarking, 0.0, with);
  const auto b = ExtractPolylines(bev, kLaneMarking, 0.0, without);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  // At most half a cell past the nearest in-class cell center.
  for (const auto& end : {a[0].points.front(), a[0].points.back()}) {
    double nearest = 1e9;
    for (int r = 0; r < 80; ++r) {
      for (int c = 0; c < 80; ++c) {
        if (bev.cells.at(c, r) == kLaneMarking) {
          nearest = std::min(nearest, (bev.CellCenter(c, r) - end.head<2>()).norm());
        }
      }
    }
    EXPECT_LE(nearest, 0.5 * bev.resolution + 1e-9);
  }
  EXPECT_LE((a[0].points.front() - b[0].points.front()).norm(), with.max_end_extension + 1e-9);
  EXPECT_LE((a[0].points.back() - b[0].points.back()).norm(), with.max_end_extension + 1e-9);
  EXPECT_GE((a[0].points.back() - a[0].points.front()).norm(),
            (b[0].points.back() - b[0].points.front()).norm());
}

TEST(ExtractPolylines, JunctionsSplitAndShortSpursArePruned) {
  auto bev = Blank(100, 100);
  Paint(&bev, 10, 90, 49, 51, kLaneMarking);  // long bar
  Paint(&bev, 49, 51, 52, 90, kLaneMarking);  // long stem: a T junction
  EXPECT_EQ(ExtractPolylines(bev, kLaneMarking, 0.05).size(), 3u);

  auto spur = Blank(100, 40);
  Paint(&spur, 10, 90, 19, 21, kLaneMarking);
  Paint(&spur, 50, 50, 22, 25, kLaneMarking);  // 0.4 m spur
  ExtractOptions opt;
  opt.spur_length = 1.0;
  const auto els = ExtractPolylines(spur, kLaneMarking, 0.05, opt);
  ASSERT_EQ(els.size(), 1u);
  EXPECT_EQ(els[0].points.size(), 2u);
}

TEST(DouglasPeucker, DropsPointsWithinTolerance) {
  const std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0.01}, {2, 0}, {3, 1}, {4, 2}};
  EXPECT_EQ(DouglasPeucker(pts, 0.05), (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(DouglasPeucker(pts, 0.0).size(), 5u);
}

TEST(LiftTo3d, FlatFieldAppendsZeroHeight) {
  const auto field = PlaneField(0, 0, 0, -10, 10, -10, 10);
  MapElement e{3, ElementClass::kLaneDivider, {{0, 0, 0}, {2.5, 0, 0}}, false};
  const VectorMap map = LiftTo3d({e}, field);
  ASSERT_EQ(map.elements.size(), 1u);
  const auto& pts = map.elements[0].points;
  EXPECT_TRUE(map.elements[0].has_z);
  ASSERT_EQ(pts.size(), 4u);  // 2.5 m split into three pieces
  for (const auto& p : pts) EXPECT_EQ(p.z(), 0.0);
}

TEST(LiftTo3d, PlanarFieldPutsVerticesOnThePlane) {
  const auto field = PlaneField(0.1, 0, 0, -1, 11, -1, 1);
  MapElement e{0, ElementClass::kRoadBoundary, {{0, 0, 0}, {10, 0, 0}}, false};
  const VectorMap map = LiftTo3d({e}, field);
  const auto& pts = map.elements[0].points;
  EXPECT_NEAR(pts.front().z(), 0.0, 1e-9);
  EXPECT_NEAR(pts.back().z(), 1.0, 1e-9);
  for (size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(pts[i].z(), 0.1 * pts[i].x(), 1e-9);
    if (i > 0) EXPECT_LE((pts[i] - pts[i - 1]).head<2>().norm(), 1.0 + 1e-9);
  }
}

TEST(LiftTo3d, PreservesXyAndRejectsOutOfBounds) {
  const auto field = PlaneField(0.02, -0.03, 0.5, -5, 5, -5, 5);
  MapElement e{1, ElementClass::kLaneDivider, {{-4, -4, 0}, {0.3, 2, 0}, {4, 4.5, 0}}, false};
  const VectorMap map = LiftTo3d({e}, field, 0.7);
  const auto dense = Densify(e.points, 0.7);
  ASSERT_EQ(dense.size(), map.elements[0].points.size());
  for (size_t i = 0; i < dense.size(); ++i) {
    EXPECT_EQ(dense[i].x(), map.elements[0].points[i].x());
    EXPECT_EQ(dense[i].y(), map.elements[0].points[i].y());
  }
  MapElement out{2, ElementClass::kLaneDivider, {{0, 0, 0}, {6, 0, 0}}, false};
  EXPECT_THROW(LiftTo3d({e, out}, field), OutOfBoundsError);
}

TEST(VectorMapJson, RoundTripsAndValidates) {
  VectorMap map;
  map.elements.push_back({4, ElementClass::kPedCrossing, {{0.1, 0.2, 0.3}, {1.0 / 3.0, 2, 1e-7}}, true});
  map.elements.push_back({5, ElementClass::kLaneDivider, {{0, 0, 0}, {1, 1, 0}}, false});
  const VectorMap back = VectorMapFromJson(VectorMapToJson(map));
  ASSERT_EQ(back.elements.size(), 2u);
  EXPECT_EQ(back.elements[0].points, map.elements[0].points);
  EXPECT_EQ(back.elements[0].cls, ElementClass::kPedCrossing);
  EXPECT_FALSE(back.elements[1].has_z);
  EXPECT_EQ(VectorMapToJson(back), VectorMapToJson(map));
  map.elements[1].id = 4;
  EXPECT_THROW(map.Validate(), InvalidArgumentError);
  EXPECT_THROW(VectorMapFromJson("{\"elements\": [{\"id\": 1}]}"), ParseError);
}

}  // namespace
}  // namespace roadrecon
