#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mowplan/decompose.hpp"
#include "mowplan/geo.hpp"
#include "mowplan/raster.hpp"

namespace mowplan::pathgen {

using geo::LocalPoint;
using raster::GridMap;

enum class TurnType { kUTurn, kThreePoint };
enum class SegmentMode { kMow, kTurn, kTravel, kBorder };

const char* to_string(TurnType t);
const char* to_string(SegmentMode m);
std::optional<TurnType> parse_turn_type(const std::string& s);
std::optional<SegmentMode> parse_segment_mode(const std::string& s);

struct MowerProfile {
  double mowing_width = 1.0;
  double overlap = 0.1;
  double boundary_offset = 0.15;
  double turn_radius = 0.4;
  TurnType turn_type = TurnType::kUTurn;

  double spacing() const { return mowing_width - overlap; }
  /// Throws kInvalidInput when a field is out of range.
  void validate() const;

  friend bool operator==(const MowerProfile&, const MowerProfile&) = default;
};

struct PathSegment {
  std::vector<LocalPoint> points;
  SegmentMode mode = SegmentMode::kMow;
  int region = 0;  // 0 = none
  /// Which serpentine of the region this belongs to. A region whose eroded
  /// shape is not monotone is covered by several.
  int piece = 0;

  double length() const;
  const LocalPoint& front() const { return points.front(); }
  const LocalPoint& back() const { return points.back(); }
};

struct CoveragePlan {
  std::vector<PathSegment> segments;
  double theta = 0.0;
  MowerProfile profile;
  geo::LocalFrame frame;
  int region_count = 0;
  std::vector<std::string> warnings;
};

/// Position plus heading in radians, counterclockwise from +x.
struct Pose {
  LocalPoint p;
  double heading = 0.0;
};

/// One straight track before it is oriented: spans [v0, v1] along the track
/// direction at lateral offset u.
struct Track {
  double u = 0.0;
  double v0 = 0.0;
  double v1 = 0.0;
};

/// Unit vector along the tracks for sweep angle theta (degrees).
LocalPoint track_direction(double theta_deg);
/// Unit vector across the tracks (u axis); points to the right of travel.
LocalPoint cross_direction(double theta_deg);

/// Raw parallel tracks of one region, sorted by u. Tracks keep half the mowing
/// width from other regions and half the width plus the boundary offset from
/// non-lawn cells. Throws kTurnInfeasible if several tracks are needed but the
/// turn radius exceeds half the region's extent across the tracks.
std::vector<Track> region_tracks(const GridMap& regions, int region_id, double theta_deg,
                                 const MowerProfile& profile);

/// A region's tracks laid out as one serpentine with turns.
struct RegionPass {
  int region = 0;
  std::vector<PathSegment> segments;  // Mow, Turn, Mow, ...
  LocalPoint entry;
  LocalPoint exit;
};

/// Serpentine over `tracks` starting at the low-u (or high-u) side, running
/// the first track forward (+track direction) or backward. Turn ends are
/// trimmed and retracted as the turn geometry demands; tracks that vanish
/// are dropped.
RegionPass serpentine(std::vector<Track> tracks, int region_id, double theta_deg, const MowerProfile& profile,
                      bool from_high_u, bool first_forward);

/// Mow segments of a region in serpentine order (low-u side, forward first).
std::vector<PathSegment> generate_tracks(const GridMap& regions, int region_id, double theta_deg,
                                         const MowerProfile& profile);

/// Maneuver from the end of one track to the start of the adjacent one, which
/// must run antiparallel.
PathSegment synthesize_turn(const Pose& end_a, const Pose& start_b, const MowerProfile& profile);

/// How far past the track ends a turn between tracks `spacing` apart reaches,
/// maximized over both turn types.
double turn_depth(double spacing, double radius);

/// Closed Border loops inset boundary_offset + mowing_width/2 from the outer
/// ring and outset the same from each hole. Empty (with a warning) when the
/// inset swallows the polygon.
std::vector<PathSegment> border_loop(const geo::LocalPolygon& polygon, const MowerProfile& profile,
                                     std::vector<std::string>* warnings = nullptr);

/// Greedy nearest-neighbour order over the regions' possible entry points.
struct RegionChoice {
  int region = 0;
  int variant = 0;  // index into the candidate list of that region
};
std::vector<RegionChoice> order_regions(const std::vector<std::vector<RegionPass>>& candidates, LocalPoint start);

/// Region ids of a decomposition in visiting order, using its default tracks.
std::vector<int> order_regions(const decompose::Decomposition& decomp, const MowerProfile& profile,
                               LocalPoint start);

/// Non-mowing routes across the lawn. Reuses the clearance field between
/// queries.
class TravelPlanner {
 public:
  TravelPlanner(const GridMap& grid, const MowerProfile& profile);
  /// nullopt when from == to. Throws kDisconnectedLawn when no route exists.
  std::optional<PathSegment> connect(LocalPoint from, LocalPoint to, SegmentMode mode = SegmentMode::kTravel) const;
  /// Smallest distance to non-lawn along the polyline, interpolated between
  /// cell centers.
  double min_clearance(const PathSegment& seg) const;

 private:
  const GridMap& grid_;
  std::vector<double> clearance_;  // edge distance to non-lawn per cell
  std::vector<double> levels_;
};

std::optional<PathSegment> connect_regions(LocalPoint from, LocalPoint to, const GridMap& grid,
                                           const MowerProfile& profile);

/// Full plan: border loops from the vertex nearest `start`, then regions in
/// greedy order joined by Travel connectors. Moves between border loops and
/// onto the first region are tagged Turn, so Travel segments only join
/// regions.
CoveragePlan build_plan(const decompose::Decomposition& decomp, const geo::LocalPolygon& polygon,
                        const GridMap& grid, const MowerProfile& profile, LocalPoint start);

}  // namespace mowplan::pathgen
