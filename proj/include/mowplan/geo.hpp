#pragma once

#include <vector>

namespace mowplan::geo {

/// WGS84 position in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Boundary ring plus obstacle holes. Rings are stored closed (first == last).
struct GeoPolygon {
  std::vector<GeoPoint> boundary;
  std::vector<std::vector<GeoPoint>> holes;
};

/// Metric position in the tangent plane: x east, y north, meters.
struct LocalPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const LocalPoint&, const LocalPoint&) = default;
};

using LocalRing = std::vector<LocalPoint>;

/// Polygon in the local frame. Rings are open (no repeated closing vertex).
struct LocalPolygon {
  LocalRing outer;
  std::vector<LocalRing> holes;
};

/// Equirectangular tangent plane anchored at `origin`.
struct LocalFrame {
  GeoPoint origin;
  double meters_per_deg_lat = 0.0;
  double meters_per_deg_lon = 0.0;
};

/// Points farther than this from the frame origin are rejected by to_local.
inline constexpr double kValidityWindowMeters = 10'000.0;

/// Meridional and parallel scale factors of the WGS84 ellipsoid at `lat_deg`.
double meters_per_degree_lat(double lat_deg);
double meters_per_degree_lon(double lat_deg);

/// Frame centered on the bounding box of the boundary ring.
LocalFrame make_frame(const GeoPolygon& polygon);

LocalPoint to_local(const LocalFrame& frame, const GeoPoint& p);
GeoPoint to_geodetic(const LocalFrame& frame, const LocalPoint& p);

LocalPolygon to_local(const LocalFrame& frame, const GeoPolygon& polygon);

/// Signed shoelace area of an open ring (positive for counterclockwise).
double signed_area(const LocalRing& ring);

}  // namespace mowplan::geo
