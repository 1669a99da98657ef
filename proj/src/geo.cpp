#include "mowplan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mowplan/error.hpp"

namespace mowplan {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kOutOfRange: return "out-of-range";
    case ErrorKind::kDegeneratePolygon: return "degenerate-polygon";
    case ErrorKind::kGridTooLarge: return "grid-too-large";
    case ErrorKind::kTurnInfeasible: return "turn-infeasible";
    case ErrorKind::kDisconnectedLawn: return "disconnected-lawn";
    case ErrorKind::kEmptyLawn: return "empty-lawn";
    case ErrorKind::kUndefinedDistancePerCoverage: return "undefined-dc";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kSelfIntersection: return "self-intersection";
    case ErrorKind::kHoleOutsideBoundary: return "hole-outside-boundary";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

namespace geo {
namespace {

constexpr double kSemiMajor = 6378137.0;
constexpr double kFlattening = 1.0 / 298.257223563;
constexpr double kEccSq = kFlattening * (2.0 - kFlattening);
constexpr double kDegToRad = std::numbers::pi / 180.0;

bool finite(const LocalPoint& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

double meters_per_degree_lat(double lat_deg) {
  const double s = std::sin(lat_deg * kDegToRad);
  const double w = 1.0 - kEccSq * s * s;
  const double meridian_radius = kSemiMajor * (1.0 - kEccSq) / (w * std::sqrt(w));
  return meridian_radius * kDegToRad;
}

double meters_per_degree_lon(double lat_deg) {
  const double phi = lat_deg * kDegToRad;
  const double s = std::sin(phi);
  const double normal_radius = kSemiMajor / std::sqrt(1.0 - kEccSq * s * s);
  return std::max(0.0, normal_radius * std::cos(phi) * kDegToRad);
}

double signed_area(const LocalRing& ring) {
  double twice = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const LocalPoint& a = ring[i];
    const LocalPoint& b = ring[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

LocalFrame make_frame(const GeoPolygon& polygon) {
  if (polygon.boundary.size() < 3) {
    throw PlanningError(ErrorKind::kInvalidInput, "boundary needs at least 3 vertices");
  }
  double lat_min = polygon.boundary.front().lat, lat_max = lat_min;
  double lon_min = polygon.boundary.front().lon, lon_max = lon_min;
  for (const GeoPoint& p : polygon.boundary) {
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || std::abs(p.lat) > 90.0 ||
        std::abs(p.lon) > 180.0) {
      throw PlanningError(ErrorKind::kInvalidInput, "boundary vertex outside WGS84 range");
    }
    lat_min = std::min(lat_min, p.lat);
    lat_max = std::max(lat_max, p.lat);
    lon_min = std::min(lon_min, p.lon);
    lon_max = std::max(lon_max, p.lon);
  }

  LocalFrame frame;
  frame.origin = {0.5 * (lat_min + lat_max), 0.5 * (lon_min + lon_max)};
  frame.meters_per_deg_lat = meters_per_degree_lat(frame.origin.lat);
  frame.meters_per_deg_lon = meters_per_degree_lon(frame.origin.lat);

  LocalRing ring;
  ring.reserve(polygon.boundary.size());
  for (const GeoPoint& p : polygon.boundary) {
    ring.push_back({(p.lon - frame.origin.lon) * frame.meters_per_deg_lon,
                    (p.lat - frame.origin.lat) * frame.meters_per_deg_lat});
  }
  if (std::abs(signed_area(ring)) <= 1e-9) {
    throw PlanningError(ErrorKind::kInvalidInput, "boundary polygon has zero area");
  }
  return frame;
}

LocalPoint to_local(const LocalFrame& frame, const GeoPoint& p) {
  const LocalPoint out{(p.lon - frame.origin.lon) * frame.meters_per_deg_lon,
                       (p.lat - frame.origin.lat) * frame.meters_per_deg_lat};
  if (!finite(out) || std::hypot(out.x, out.y) > kValidityWindowMeters) {
    throw PlanningError(ErrorKind::kOutOfRange,
                        "point lies outside the 10 km validity window of the local frame");
  }
  return out;
}

GeoPoint to_geodetic(const LocalFrame& frame, const LocalPoint& p) {
  if (!finite(p)) {
    throw PlanningError(ErrorKind::kInvalidInput, "non-finite local coordinate");
  }
  GeoPoint out;
  out.lat = frame.origin.lat + p.y / frame.meters_per_deg_lat;
  out.lon = frame.meters_per_deg_lon > 0.0 ? frame.origin.lon + p.x / frame.meters_per_deg_lon
                                           : frame.origin.lon;
  return out;
}

LocalPolygon to_local(const LocalFrame& frame, const GeoPolygon& polygon) {
  auto convert = [&](const std::vector<GeoPoint>& ring) {
    LocalRing out;
    out.reserve(ring.size());
    for (const GeoPoint& p : ring) out.push_back(to_local(frame, p));
    if (out.size() > 1 && out.front() == out.back()) out.pop_back();
    return out;
  };
  LocalPolygon local;
  local.outer = convert(polygon.boundary);
  for (const auto& hole : polygon.holes) local.holes.push_back(convert(hole));
  return local;
}

}  // namespace geo
}  // namespace mowplan
