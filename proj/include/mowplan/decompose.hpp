#pragma once

#include <map>
#include <span>
#include <vector>

#include "mowplan/raster.hpp"

namespace mowplan::decompose {

using raster::CellState;
using raster::GridMap;
using raster::Interval;

enum class EventKind { kSplit, kMerge, kColumnStart, kColumnEnd };

const char* to_string(EventKind kind);

/// A critical point in column `column`, compared against column - 1.
struct CriticalEvent {
  int column = 0;
  int row = 0;
  EventKind kind = EventKind::kSplit;
  CellState prev_state;  // cell (column - 1, row)
  CellState state;       // cell (column, row)
  /// Rows of `column` affected by a Split/Merge: the intervals that split off
  /// one predecessor, or the interval that joins several. Unused for
  /// ColumnStart/ColumnEnd.
  Interval span;

  friend bool operator==(const CriticalEvent&, const CriticalEvent&) = default;
};

/// Critical points of one column in ascending row order.
struct ColumnEvents {
  int column = 0;
  std::vector<CriticalEvent> events;

  bool empty() const { return events.empty(); }
  friend bool operator==(const ColumnEvents&, const ColumnEvents&) = default;
};

struct Decomposition {
  /// Region labels in the frame of the grid handed to decompose_merge.
  GridMap regions;
  int region_count = 0;
  double theta = 0.0;
  /// Surviving events per column, in the rotated frame.
  std::vector<ColumnEvents> events_used;
  /// Regions that still intersect some rotated column in more than one
  /// interval after the sweepability guard.
  std::vector<int> non_sweepable;
};

struct SweepResult {
  Decomposition best;
  /// Region count per evaluated angle.
  std::map<double, int> all;
  /// Rotated columns meeting the lawn per evaluated angle (tie-break key).
  std::map<double, int> columns;
};

/// Split/Merge detection between column - 1 and column. When at least one is
/// found, the column's first and last lawn rows are added as ColumnStart and
/// ColumnEnd. Requires 1 <= column < grid.width.
ColumnEvents critical_points(int column, const GridMap& grid);

/// Drops the first element of the ordered list.
ColumnEvents merge_events(ColumnEvents events);

/// Marks separator cells as NonLawn: in every event column, lawn cells between
/// consecutive critical points that lie inside a Split/Merge span.
GridMap apply_lines(std::span<const ColumnEvents> all_events, const GridMap& grid);

/// apply_lines followed by component labeling. Separator cells are handed to
/// the region on their right (falling back to the nearest region) so that
/// every lawn cell carries a label; region_count counts the components of the
/// lined grid.
Decomposition draw_lines(std::span<const ColumnEvents> all_events, const GridMap& grid);

/// Decomposition carried out in the rotated frame, before labels are mapped
/// back to the input grid.
struct RotatedDecomposition {
  raster::RotatedView view;
  std::vector<ColumnEvents> events;
  GridMap lined;   // rotated grid with separators removed
  GridMap labels;  // rotated labels incl. reassigned separator cells
  int region_count = 0;
  std::vector<int> non_sweepable;
};

// Each operation comes in two flavours. Given only the grid, rotated images are
// resampled from it (nearest neighbour) and cleaned of one-cell artifacts.
// Given the lawn polygon as well, rotated images are rasterized from the
// polygon directly, which avoids quantizing the boundary twice; `grid` must
// then be rasterize(lawn, resolution).

RotatedDecomposition decompose_rotated(double theta_deg, const GridMap& grid, bool merging);
RotatedDecomposition decompose_rotated(double theta_deg, const geo::LocalPolygon& lawn, const GridMap& grid,
                                       bool merging);

/// Region count only; skips building label grids.
int count_regions(double theta_deg, const GridMap& grid, bool merging);
int count_regions(double theta_deg, const geo::LocalPolygon& lawn, const GridMap& grid, bool merging);

/// One pass of the decompose-then-merge procedure at `theta_deg`; labels are
/// returned in the input grid frame.
Decomposition decompose_merge(double theta_deg, const GridMap& grid, bool merging);
Decomposition decompose_merge(double theta_deg, const geo::LocalPolygon& lawn, const GridMap& grid,
                              bool merging);

/// Evaluates every angle in {0, step, ..., 180} and keeps the one with the
/// fewest regions. Ties go to the angle whose rotated lawn spans the fewest
/// columns (fewer tracks), then to the smallest angle.
SweepResult adaptive_decomposition(const GridMap& grid, bool merging, double angle_step = 1.0);
SweepResult adaptive_decomposition(const geo::LocalPolygon& lawn, const GridMap& grid, bool merging,
                                   double angle_step = 1.0);

/// True if every region meets every column in at most one interval.
std::vector<int> non_monotone_regions(const GridMap& labels);

}  // namespace mowplan::decompose
