#include "mowplan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mowplan/error.hpp"

namespace mowplan::metrics {

using pathgen::SegmentMode;

namespace {

double segment_distance(double px, double py, const LocalPoint& a, const LocalPoint& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (a.x + t * dx), py - (a.y + t * dy));
}

// Marks every cell within `r` of segment ab. Rows are scanned over the
// x-range the capsule can reach, then each candidate is tested exactly.
void stamp(const LocalPoint& a, const LocalPoint& b, double r, const GridMap& grid, std::vector<std::uint8_t>& hit) {
  const double res = grid.resolution;
  const int row0 = std::max(0, static_cast<int>(std::floor((std::min(a.y, b.y) - r - grid.origin.y) / res)));
  const int row1 =
      std::min(grid.height - 1, static_cast<int>(std::ceil((std::max(a.y, b.y) + r - grid.origin.y) / res)));
  for (int row = row0; row <= row1; ++row) {
    const double y = grid.origin.y + row * res;
    // Part of the segment within r of this row, vertically.
    double x_lo, x_hi;
    if (std::abs(b.y - a.y) < 1e-12) {
      x_lo = std::min(a.x, b.x);
      x_hi = std::max(a.x, b.x);
    } else {
      const double t0 = std::clamp((y - r - a.y) / (b.y - a.y), 0.0, 1.0);
      const double t1 = std::clamp((y + r - a.y) / (b.y - a.y), 0.0, 1.0);
      const double xa = a.x + t0 * (b.x - a.x), xb = a.x + t1 * (b.x - a.x);
      x_lo = std::min(xa, xb);
      x_hi = std::max(xa, xb);
    }
    const int c0 = std::max(0, static_cast<int>(std::floor((x_lo - r - grid.origin.x) / res)) - 1);
    const int c1 = std::min(grid.width - 1, static_cast<int>(std::ceil((x_hi + r - grid.origin.x) / res)) + 1);
    for (int col = c0; col <= c1; ++col) {
      const std::size_t i = grid.index(col, row);
      if (hit[i] || !grid.cells[i].is_free()) continue;
      if (segment_distance(grid.origin.x + col * res, y, a, b) <= r) hit[i] = 1;
    }
  }
}

bool mows(SegmentMode m) { return m == SegmentMode::kMow || m == SegmentMode::kBorder; }

double heading_change(const LocalPoint& a, const LocalPoint& b, const LocalPoint& c) {
  const double h1 = std::atan2(b.y - a.y, b.x - a.x);
  const double h2 = std::atan2(c.y - b.y, c.x - b.x);
  double d = std::abs(h2 - h1);
  if (d > std::numbers::pi) d = 2.0 * std::numbers::pi - d;
  return d;
}

}  // namespace

std::vector<std::uint8_t> covered_cells(const CoveragePlan& plan, const GridMap& grid, const MowerProfile& profile) {
  std::vector<std::uint8_t> hit(grid.cells.size(), 0);
  const double r = 0.5 * profile.mowing_width;
  for (const auto& seg : plan.segments) {
    if (!mows(seg.mode)) continue;
    for (std::size_t k = 1; k < seg.points.size(); ++k) stamp(seg.points[k - 1], seg.points[k], r, grid, hit);
    if (seg.points.size() == 1) stamp(seg.points[0], seg.points[0], r, grid, hit);
  }
  return hit;
}

double swath_coverage(const CoveragePlan& plan, const GridMap& grid, const MowerProfile& profile) {
  const std::size_t lawn = grid.count_free();
  if (lawn == 0) throw PlanningError(ErrorKind::kEmptyLawn, "grid has no lawn cells");
  const auto hit = covered_cells(plan, grid, profile);
  const auto covered = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), std::uint8_t{1}));
  return 100.0 * static_cast<double>(covered) / static_cast<double>(lawn);
}

std::pair<double, double> distances(const CoveragePlan& plan) {
  double mow = 0.0, other = 0.0;
  for (const auto& seg : plan.segments) (mows(seg.mode) ? mow : other) += seg.length();
  return {mow, other};
}

int count_turns(const CoveragePlan& plan) {
  const double limit = kTurnThresholdDeg * std::numbers::pi / 180.0;
  int turns = 0;
  for (const auto& seg : plan.segments) {
    if (seg.mode == SegmentMode::kTurn) {
      ++turns;
      continue;
    }
    if (seg.mode != SegmentMode::kTravel && seg.mode != SegmentMode::kBorder) continue;
    const auto& p = seg.points;
    for (std::size_t i = 2; i < p.size(); ++i) turns += heading_change(p[i - 2], p[i - 1], p[i]) > limit;
    const bool closed = p.size() >= 4 && std::hypot(p.front().x - p.back().x, p.front().y - p.back().y) < 1e-9;
    if (closed) turns += heading_change(p[p.size() - 2], p[0], p[1]) > limit;
  }
  return turns;
}

double distance_per_coverage(double mowing, double non_mowing, double coverage_percent) {
  if (!(coverage_percent > 0.0)) {
    throw PlanningError(ErrorKind::kUndefinedDistancePerCoverage, "distance per coverage undefined at zero coverage");
  }
  return (mowing + non_mowing) / coverage_percent;
}

PlanMetrics evaluate(const CoveragePlan& plan, const GridMap& grid, const MowerProfile& profile) {
  PlanMetrics m;
  m.coverage_percent = swath_coverage(plan, grid, profile);
  std::tie(m.mowing_distance, m.non_mowing_distance) = distances(plan);
  m.turn_count = count_turns(plan);
  m.distance_per_coverage = distance_per_coverage(m.mowing_distance, m.non_mowing_distance, m.coverage_percent);
  m.region_count = plan.region_count;
  return m;
}

}  // namespace mowplan::metrics
