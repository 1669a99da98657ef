#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "mowplan/error.hpp"
#include "mowplan/pathgen.hpp"
#include "support/corpus.hpp"
#include "support/geometry.hpp"
#include "support/plans.hpp"

using namespace mowplan;
using namespace mowplan::pathgen;
using mowplan::testing::count_mode;
using raster::CellState;
using raster::GridMap;

namespace {

constexpr double kPi = std::numbers::pi;

// Single-region label grid of a polygon.
GridMap single_region(const geo::LocalPolygon& poly, double res = 0.1) {
  GridMap g = raster::rasterize(poly, res);
  for (CellState& s : g.cells)
    if (s.is_free()) s = CellState::region(1);
  return g;
}

MowerProfile profile(double width, double overlap, double offset = 0.0, double radius = 0.4,
                     TurnType type = TurnType::kUTurn) {
  MowerProfile p;
  p.mowing_width = width;
  p.overlap = overlap;
  p.boundary_offset = offset;
  p.turn_radius = radius;
  p.turn_type = type;
  return p;
}

int expected_tracks(double extent, double width, double spacing) {
  return static_cast<int>(std::ceil((extent - width) / spacing - 1e-9)) + 1;
}

double max_heading_change(const std::vector<geo::LocalPoint>& pts) {
  double worst = 0.0;
  for (std::size_t i = 2; i < pts.size(); ++i) {
    const double a = std::atan2(pts[i - 1].y - pts[i - 2].y, pts[i - 1].x - pts[i - 2].x);
    const double b = std::atan2(pts[i].y - pts[i - 1].y, pts[i].x - pts[i - 1].x);
    double d = std::abs(b - a);
    if (d > kPi) d = 2 * kPi - d;
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

TEST(GenerateTracks, TenMetreSquareGivesTenTracksOfNineMetres) {
  const GridMap g = single_region(mowplan::testing::rectangle(10, 10));
  for (double theta : {0.0, 90.0}) {
    const auto tracks = generate_tracks(g, 1, theta, profile(1.0, 0.0));
    ASSERT_EQ(tracks.size(), 10u) << theta;
    for (const auto& t : tracks) {
      EXPECT_EQ(t.mode, SegmentMode::kMow);
      EXPECT_NEAR(t.length(), 9.0, 0.1);
    }
  }
}

TEST(GenerateTracks, NarrowRegionGetsOneCenteredTrack) {
  const GridMap g = single_region(mowplan::testing::rectangle(10, 0.6));
  const auto tracks = generate_tracks(g, 1, 0.0, profile(1.0, 0.0));
  ASSERT_EQ(tracks.size(), 1u);
  EXPECT_NEAR(tracks[0].front().y, 0.3, 0.06);
  EXPECT_NEAR(tracks[0].back().y, 0.3, 0.06);
}

TEST(GenerateTracks, EmptyRegionGivesNothing) {
  const GridMap g = single_region(mowplan::testing::rectangle(10, 10));
  EXPECT_TRUE(generate_tracks(g, 7, 0.0, profile(1.0, 0.0)).empty());
}

TEST(GenerateTracks, CountFollowsSpacingOracle) {
  for (double extent : {10.0, 12.5, 7.3, 20.0}) {
    const GridMap g = single_region(mowplan::testing::rectangle(extent, 15));
    const auto tracks = generate_tracks(g, 1, 90.0, profile(1.0, 0.1));
    EXPECT_EQ(static_cast<int>(tracks.size()), expected_tracks(extent, 1.0, 0.9)) << extent;
  }
}

TEST(GenerateTracks, RegionWrappingAnObstacleLeavesNoInteriorGap) {
  // The whole hole map as one region: lines passing the hole meet its eroded
  // shape twice, so it is covered by several serpentines.
  const auto poly = mowplan::testing::hole_map();
  const GridMap g = single_region(poly);
  const MowerProfile p = profile(1.0, 0.1, 0.15);
  for (double theta : {0.0, 90.0, 36.0}) {
    const auto mow = generate_tracks(g, 1, theta, p);
    int missed = 0;
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        const auto q = g.center(c, r);
        if (!g.at(c, r).is_free() || mowplan::testing::boundary_distance(poly, q) < 1.0) continue;
        bool hit = false;
        for (const auto& s : mow) hit = hit || mowplan::testing::segment_distance(q, s.front(), s.back()) <= 0.5;
        missed += !hit;
      }
    }
    EXPECT_EQ(missed, 0) << theta;
  }
}

TEST(GenerateTracks, ParallelSpacedAndAlternating) {
  const GridMap g = single_region(mowplan::testing::rectangle(20, 14));
  const double theta = 90.0;
  const auto tracks = generate_tracks(g, 1, theta, profile(1.0, 0.1));
  ASSERT_GE(tracks.size(), 3u);
  const auto n = cross_direction(theta);
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const auto& s = tracks[i];
    ASSERT_EQ(s.points.size(), 2u);
    const double heading = std::atan2(s.back().y - s.front().y, s.back().x - s.front().x);
    EXPECT_NEAR(std::sin(heading - theta * kPi / 180.0), 0.0, 1e-9);
    if (i > 0) {
      const auto& p = tracks[i - 1];
      const double gap = std::abs((s.front().x - p.front().x) * n.x + (s.front().y - p.front().y) * n.y);
      if (i + 1 < tracks.size()) EXPECT_NEAR(gap, 0.9, 0.1);
      else EXPECT_LE(gap, 0.9 + 0.1);
      const double dot = (s.back().x - s.front().x) * (p.back().x - p.front().x) +
                         (s.back().y - s.front().y) * (p.back().y - p.front().y);
      EXPECT_LT(dot, 0.0) << "serpentine must alternate";
    }
  }
}

TEST(SynthesizeTurn, SemicircleWhenSpacingIsTwiceTheRadius) {
  const MowerProfile p = profile(1.0, 0.0, 0.0, 0.5);
  const PathSegment turn = synthesize_turn({{0, 0}, kPi / 2}, {{1, 0}, -kPi / 2}, p);
  EXPECT_EQ(turn.mode, SegmentMode::kTurn);
  EXPECT_NEAR(turn.length(), kPi * 0.5, kPi * 0.5 * 0.01);
  EXPECT_LE(max_heading_change(turn.points), 5.0 * kPi / 180.0 + 1e-9);
  EXPECT_DOUBLE_EQ(turn.front().x, 0.0);
  EXPECT_DOUBLE_EQ(turn.back().x, 1.0);
}

TEST(SynthesizeTurn, QuarterArcsAndCrossingWhenWide) {
  const MowerProfile p = profile(1.0, 0.0, 0.0, 0.3);
  const PathSegment turn = synthesize_turn({{0, 0}, kPi / 2}, {{1, 0}, -kPi / 2}, p);
  EXPECT_NEAR(turn.length(), kPi * 0.3 + (1.0 - 0.6), 0.01);
  for (const auto& q : turn.points) EXPECT_LE(q.y, 0.3 + 1e-9);
}

TEST(SynthesizeTurn, ZeroRadiusIsStraightAcross) {
  const MowerProfile p = profile(1.0, 0.0, 0.0, 0.0);
  const PathSegment turn = synthesize_turn({{0, 0}, kPi / 2}, {{1, 0}, -kPi / 2}, p);
  EXPECT_NEAR(turn.length(), 1.0, 1e-12);
}

TEST(SynthesizeTurn, BulbWhenSpacingBelowTwiceTheRadius) {
  const MowerProfile p = profile(1.0, 0.0, 0.0, 1.0);
  const PathSegment turn = synthesize_turn({{0, 0}, kPi / 2}, {{1, 0}, -kPi / 2}, p);
  EXPECT_GT(turn.length(), kPi * 0.5);
  // Three tangent circles: cos(alpha) = (d + 2r) / 4r, length r (pi + 4 alpha).
  const double alpha = std::acos(3.0 / 4.0);
  EXPECT_NEAR(turn.length(), kPi + 4 * alpha, (kPi + 4 * alpha) * 0.01);
  double top = 0.0;
  for (const auto& q : turn.points) top = std::max(top, q.y);
  EXPECT_NEAR(top, 1.0 + 2 * std::sin(alpha), 0.01);
  EXPECT_NEAR(turn_depth(1.0, 1.0), 1.0 + 2 * std::sin(alpha), 1e-12);
  EXPECT_LE(max_heading_change(turn.points), 5.0 * kPi / 180.0 + 1e-9);
}

TEST(SynthesizeTurn, ThreePointEndsOneSpacingOver) {
  for (double r : {0.3, 0.5, 0.8}) {
    for (double side : {1.0, -1.0}) {
      const MowerProfile p = profile(1.0, 0.1, 0.0, r, TurnType::kThreePoint);
      const Pose a{{2, 3}, 0.0};
      const Pose b{{2, 3 - side * 0.9}, kPi};
      const PathSegment turn = synthesize_turn(a, b, p);
      EXPECT_DOUBLE_EQ(turn.front().y, 3.0);
      EXPECT_DOUBLE_EQ(turn.back().y, 3 - side * 0.9);
      for (std::size_t i = 1; i < turn.points.size(); ++i) {
        EXPECT_GT(std::hypot(turn.points[i].x - turn.points[i - 1].x, turn.points[i].y - turn.points[i - 1].y),
                  1e-9);
      }
      // Never further than one radius past the track end.
      for (const auto& q : turn.points) EXPECT_LE(q.x, 2 + r + 1e-9);
      // Exactly one reversal.
      int cusps = 0;
      for (std::size_t i = 2; i < turn.points.size(); ++i) {
        const double ax = turn.points[i - 1].x - turn.points[i - 2].x, ay = turn.points[i - 1].y - turn.points[i - 2].y;
        const double bx = turn.points[i].x - turn.points[i - 1].x, by = turn.points[i].y - turn.points[i - 1].y;
        if (ax * bx + ay * by < 0) ++cusps;
      }
      EXPECT_EQ(cusps, 2) << r;  // into and out of the reverse leg
    }
  }
}

TEST(SynthesizeTurn, HandlesStaggeredEnds) {
  const MowerProfile p = profile(1.0, 0.0, 0.0, 0.3);
  const PathSegment turn = synthesize_turn({{0, 5}, kPi / 2}, {{1, 3.5}, -kPi / 2}, p);
  EXPECT_DOUBLE_EQ(turn.back().y, 3.5);
  EXPECT_LE(max_heading_change(turn.points), 5.0 * kPi / 180.0 + 1e-9);
}

TEST(SynthesizeTurn, RejectsParallelHeadings) {
  EXPECT_THROW(synthesize_turn({{0, 0}, 0.0}, {{1, 0}, 0.0}, profile(1, 0)), PlanningError);
}

TEST(RegionTracks, RadiusWiderThanRegionIsInfeasible) {
  const GridMap g = single_region(mowplan::testing::rectangle(3, 20));
  try {
    region_tracks(g, 1, 90.0, profile(1.0, 0.0, 0.0, 2.0));
    FAIL() << "expected turn-infeasible";
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTurnInfeasible);
  }
}

TEST(BorderLoop, SquareInsetPerimeter) {
  const auto loops = border_loop(mowplan::testing::rectangle(10, 10), profile(1.0, 0.0));
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops[0].mode, SegmentMode::kBorder);
  EXPECT_NEAR(loops[0].length(), 4 * (10 - 2 * 0.5), 1e-5);
  EXPECT_DOUBLE_EQ(loops[0].front().x, loops[0].back().x);
  EXPECT_DOUBLE_EQ(loops[0].front().y, loops[0].back().y);
  for (const auto& q : loops[0].points) {
    EXPECT_NEAR(mowplan::testing::boundary_distance(mowplan::testing::rectangle(10, 10), q), 0.5, 1e-5);
  }
}

TEST(BorderLoop, VanishesWhenInsetTooLarge) {
  std::vector<std::string> warnings;
  EXPECT_TRUE(border_loop(mowplan::testing::rectangle(10, 10), profile(1.0, 0.0, 5.0), &warnings).empty());
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(BorderLoop, HoleGetsItsOwnLoop) {
  const auto loops = border_loop(mowplan::testing::hole_map(), profile(1.0, 0.0));
  ASSERT_EQ(loops.size(), 2u);
  EXPECT_NEAR(loops[0].length(), 4 * 29.0, 1e-5);
  EXPECT_NEAR(loops[1].length(), 4 * 11.0, 1e-5);
}

TEST(OrderRegions, NearestNeighbourFromEitherEnd) {
  GridMap g(200, 40, 0.1, {0, 0});
  for (int id = 1; id <= 3; ++id) {
    const int c0 = 2 + (id - 1) * 66;
    for (int c = c0; c < c0 + 60; ++c)
      for (int r = 2; r < 38; ++r) g.at(c, r) = CellState::region(id);
  }
  decompose::Decomposition d;
  d.regions = g;
  d.region_count = 3;
  d.theta = 90.0;
  const MowerProfile p = profile(1.0, 0.1);
  EXPECT_EQ(order_regions(d, p, {0.0, 2.0}), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(order_regions(d, p, {20.0, 2.0}), (std::vector<int>{3, 2, 1}));

  decompose::Decomposition one = d;
  for (CellState& s : one.regions.cells)
    if (s.region_id() > 1) s = CellState::non_lawn();
  one.region_count = 1;
  EXPECT_EQ(order_regions(one, p, {20.0, 2.0}), (std::vector<int>{1}));
}

TEST(ConnectRegions, ConvexLawnIsStraight) {
  const GridMap g = raster::rasterize(mowplan::testing::rectangle(20, 20), 0.1);
  const auto seg = connect_regions({2, 3}, {17, 15}, g, profile(1.0, 0.1));
  ASSERT_TRUE(seg.has_value());
  EXPECT_EQ(seg->mode, SegmentMode::kTravel);
  const double euclid = std::hypot(15.0, 12.0);
  EXPECT_NEAR(seg->length(), euclid, 0.08 * euclid);
  EXPECT_DOUBLE_EQ(seg->front().x, 2.0);
  EXPECT_DOUBLE_EQ(seg->back().y, 15.0);
}

TEST(ConnectRegions, DetoursAroundHole) {
  const auto poly = mowplan::testing::hole_map();
  const GridMap g = raster::rasterize(poly, 0.1);
  const auto seg = connect_regions({5, 15}, {25, 15}, g, profile(1.0, 0.1));
  ASSERT_TRUE(seg.has_value());
  EXPECT_GT(seg->length(), 20.0 + 1.0);
  for (const auto& q : seg->points) EXPECT_TRUE(mowplan::testing::inside(poly, q));
}

TEST(ConnectRegions, SamePointIsElided) {
  const GridMap g = raster::rasterize(mowplan::testing::rectangle(20, 20), 0.1);
  EXPECT_FALSE(connect_regions({5, 5}, {5, 5}, g, profile(1.0, 0.1)).has_value());
}

TEST(ConnectRegions, DisconnectedLawnIsAnError) {
  GridMap g = raster::rasterize(mowplan::testing::rectangle(20, 10), 0.1);
  for (int r = 0; r < g.height; ++r) g.at(g.width / 2, r) = CellState::non_lawn();
  try {
    connect_regions({2, 5}, {18, 5}, g, profile(1.0, 0.1));
    FAIL() << "expected disconnected-lawn";
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDisconnectedLawn);
  }
}

TEST(BuildPlan, RectangleHasOneLoopOneRegionNoTravel) {
  const auto r = mowplan::testing::plan_shape(mowplan::testing::rectangle(20, 12), MowerProfile{});
  EXPECT_EQ(r.decomp.region_count, 1);
  EXPECT_EQ(count_mode(r.plan, SegmentMode::kBorder), 1);
  EXPECT_EQ(count_mode(r.plan, SegmentMode::kTravel), 0);
  EXPECT_GT(count_mode(r.plan, SegmentMode::kMow), 5);
  EXPECT_EQ(r.plan.segments.front().mode, SegmentMode::kBorder);
}

TEST(BuildPlan, HoleMapTravelCountIsRegionsMinusOne) {
  for (bool merging : {true, false}) {
    const auto r = mowplan::testing::plan_shape(mowplan::testing::hole_map(), MowerProfile{}, 0.1, 0.0, merging);
    EXPECT_EQ(r.decomp.region_count, merging ? 2 : 4);
    EXPECT_EQ(count_mode(r.plan, SegmentMode::kTravel), r.decomp.region_count - 1);
    EXPECT_EQ(count_mode(r.plan, SegmentMode::kBorder), 2);
  }
}

TEST(BuildPlan, StartsAtTheConfiguredCorner) {
  const auto poly = mowplan::testing::rectangle(20, 12);
  const GridMap g = raster::rasterize(poly, 0.1);
  const auto d = decompose::decompose_merge(0.0, poly, g, true);
  const MowerProfile p;
  const double inset = p.boundary_offset + 0.5 * p.mowing_width;
  const auto sw = build_plan(d, poly, g, p, {0, 0});
  EXPECT_NEAR(sw.segments.front().front().x, inset, 1e-6);
  EXPECT_NEAR(sw.segments.front().front().y, inset, 1e-6);
  const auto ne = build_plan(d, poly, g, p, {20, 12});
  EXPECT_NEAR(ne.segments.front().front().x, 20 - inset, 1e-6);
  EXPECT_NEAR(ne.segments.front().front().y, 12 - inset, 1e-6);
}

TEST(BuildPlan, ContinuousOnRandomLawns) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto poly = mowplan::testing::random_polygon(seed);
    const auto r = mowplan::testing::plan_shape(poly, MowerProfile{}, 0.1);
    ASSERT_FALSE(r.plan.segments.empty());
    double worst = 0.0;
    for (std::size_t i = 1; i < r.plan.segments.size(); ++i) {
      const auto a = r.plan.segments[i - 1].back(), b = r.plan.segments[i].front();
      worst = std::max(worst, std::hypot(a.x - b.x, a.y - b.y));
    }
    EXPECT_LT(worst, 1e-6) << seed;
    for (const auto& s : r.plan.segments) {
      ASSERT_GE(s.points.size(), 2u);
      for (std::size_t i = 1; i < s.points.size(); ++i) {
        EXPECT_GT(std::hypot(s.points[i].x - s.points[i - 1].x, s.points[i].y - s.points[i - 1].y), 1e-9);
      }
    }
    EXPECT_EQ(count_mode(r.plan, SegmentMode::kTravel), r.decomp.region_count - 1) << seed;
  }
}

TEST(BuildPlan, InvariantsOverCorpus) {
  const MowerProfile p;
  for (const auto& shape : mowplan::testing::corpus()) {
    const auto r = mowplan::testing::plan_shape(shape.polygon, p, 0.1);
    const double theta = r.plan.theta * kPi / 180.0;
    const double res = r.grid.resolution;
    for (const auto& s : r.plan.segments) {
      if (s.mode == SegmentMode::kMow) {
        ASSERT_EQ(s.points.size(), 2u);
        const double h = std::atan2(s.back().y - s.front().y, s.back().x - s.front().x);
        EXPECT_NEAR(std::sin(h - theta), 0.0, 1e-9) << shape.name;
      }
      for (const auto& q : s.points) {
        ASSERT_TRUE(mowplan::testing::inside(shape.polygon, q)) << shape.name << " " << to_string(s.mode);
        EXPECT_GE(mowplan::testing::boundary_distance(shape.polygon, q), p.boundary_offset - res)
            << shape.name << " " << to_string(s.mode) << " at " << q.x << "," << q.y;
      }
    }
    // Spacing between adjacent tracks of the same serpentine.
    const auto n = cross_direction(r.plan.theta);
    std::map<std::pair<int, int>, std::vector<double>> offsets;
    for (const auto& s : r.plan.segments) {
      if (s.mode == SegmentMode::kMow) offsets[{s.region, s.piece}].push_back(s.front().x * n.x + s.front().y * n.y);
    }
    for (auto& [id, us] : offsets) {
      std::sort(us.begin(), us.end());
      for (std::size_t i = 1; i < us.size(); ++i) {
        const double gap = us[i] - us[i - 1];
        const bool edge = i == 1 || i + 1 == us.size();
        if (!edge) EXPECT_NEAR(gap, p.spacing(), res) << shape.name << " region " << id.first;
        EXPECT_LE(gap, p.spacing() + res) << shape.name;
      }
    }
    EXPECT_EQ(count_mode(r.plan, SegmentMode::kTravel), r.decomp.region_count - 1) << shape.name;
  }
}

TEST(BuildPlan, TurnTypeOnlyChangesTurns) {
  for (const auto& shape : mowplan::testing::corpus()) {
    MowerProfile a;
    a.turn_radius = 0.6;
    MowerProfile b = a;
    b.turn_type = TurnType::kThreePoint;
    const auto pa = mowplan::testing::plan_shape(shape.polygon, a, 0.2);
    const auto pb = mowplan::testing::plan_shape(shape.polygon, b, 0.2);
    std::vector<const PathSegment*> sa, sb;
    for (const auto& s : pa.plan.segments)
      if (s.mode != SegmentMode::kTurn) sa.push_back(&s);
    for (const auto& s : pb.plan.segments)
      if (s.mode != SegmentMode::kTurn) sb.push_back(&s);
    ASSERT_EQ(sa.size(), sb.size()) << shape.name;
    for (std::size_t i = 0; i < sa.size(); ++i) {
      EXPECT_EQ(sa[i]->mode, sb[i]->mode);
      ASSERT_EQ(sa[i]->points.size(), sb[i]->points.size()) << shape.name;
      for (std::size_t k = 0; k < sa[i]->points.size(); ++k) {
        EXPECT_EQ(sa[i]->points[k].x, sb[i]->points[k].x);
        EXPECT_EQ(sa[i]->points[k].y, sb[i]->points[k].y);
      }
    }
  }
}

TEST(MowerProfile, Validation) {
  EXPECT_THROW(profile(0.0, 0.0).validate(), PlanningError);
  EXPECT_THROW(profile(1.0, 1.0).validate(), PlanningError);
  EXPECT_THROW(profile(1.0, 0.0, -1.0).validate(), PlanningError);
  EXPECT_THROW(profile(1.0, 0.0, 0.0, -0.1).validate(), PlanningError);
  EXPECT_NO_THROW(MowerProfile{}.validate());
}
