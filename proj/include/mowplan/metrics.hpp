#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mowplan/pathgen.hpp"
#include "mowplan/raster.hpp"

namespace mowplan::metrics {

using pathgen::CoveragePlan;
using pathgen::MowerProfile;
using raster::GridMap;
using geo::LocalPoint;

struct PlanMetrics {
  double coverage_percent = 0.0;
  double mowing_distance = 0.0;
  double non_mowing_distance = 0.0;
  int turn_count = 0;
  double distance_per_coverage = 0.0;
  int region_count = 0;
};

/// Heading change above which a polyline joint counts as a turn.
inline constexpr double kTurnThresholdDeg = 45.0;

/// Lawn cells whose center lies within mowing_width/2 of a Mow or Border
/// segment, flagged per cell.
std::vector<std::uint8_t> covered_cells(const CoveragePlan& plan, const GridMap& grid, const MowerProfile& profile);

/// Percentage of lawn cells covered. Throws kEmptyLawn without lawn cells.
double swath_coverage(const CoveragePlan& plan, const GridMap& grid, const MowerProfile& profile);

/// (Mow + Border length, Travel + Turn length) in meters.
std::pair<double, double> distances(const CoveragePlan& plan);

/// Turn segments plus joints sharper than 45 degrees inside Travel and Border
/// polylines (a closed loop's closing joint included).
int count_turns(const CoveragePlan& plan);

/// (mowing + non_mowing) / coverage_percent; throws
/// kUndefinedDistancePerCoverage when coverage is zero.
double distance_per_coverage(double mowing, double non_mowing, double coverage_percent);

PlanMetrics evaluate(const CoveragePlan& plan, const GridMap& grid, const MowerProfile& profile);

}  // namespace mowplan::metrics
