#include "mowplan/geojson.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mowplan/error.hpp"

namespace mowplan::io {

using geo::GeoPoint;
using nlohmann::json;

namespace {

using Ring = std::vector<GeoPoint>;

[[noreturn]] void parse_fail(const std::string& msg) { throw PlanningError(ErrorKind::kParse, msg); }

std::string ring_name(std::size_t k) { return k == 0 ? "boundary ring" : "hole " + std::to_string(k); }

// Shoelace over lon/lat; positive means counterclockwise.
double signed_area(const Ring& closed) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i) {
    a += closed[i].lon * closed[i + 1].lat - closed[i + 1].lon * closed[i].lat;
  }
  return 0.5 * a;
}

double orient(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
  return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) && std::min(a.lat, b.lat) <= p.lat &&
         p.lat <= std::max(a.lat, b.lat);
}

bool segments_intersect(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c, const GeoPoint& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) || (o3 == 0 && on_segment(c, d, a)) ||
         (o4 == 0 && on_segment(c, d, b));
}

bool inside(const Ring& closed, const GeoPoint& p) {
  bool in = false;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i) {
    const GeoPoint& a = closed[i];
    const GeoPoint& b = closed[i + 1];
    if ((a.lat > p.lat) != (b.lat > p.lat) && p.lon < a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat)) {
      in = !in;
    }
  }
  return in;
}

Ring read_ring(const json& coords, std::size_t k, std::vector<std::string>* warnings) {
  if (!coords.is_array()) parse_fail(ring_name(k) + ": expected an array of positions");
  Ring ring;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const json& pos = coords[i];
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      parse_fail(ring_name(k) + ", position " + std::to_string(i) + ": expected [lon, lat]");
    }
    const GeoPoint p{pos[1].get<double>(), pos[0].get<double>()};
    if (!ring.empty() && ring.back() == p) continue;
    ring.push_back(p);
  }
  if (ring.size() >= 2 && ring.front() == ring.back()) {
    ring.pop_back();
  } else if (warnings && !ring.empty()) {
    warnings->push_back(ring_name(k) + " was not closed; closed automatically");
  }
  if (ring.size() < 3) {
    throw PlanningError(ErrorKind::kDegeneratePolygon, ring_name(k) + ": fewer than 3 distinct vertices");
  }
  ring.push_back(ring.front());
  return ring;
}

void check_simple(const Ring& r, std::size_t k) {
  const std::size_t n = r.size() - 1;  // edges
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(r[i], r[i + 1], r[j], r[j + 1])) {
        throw PlanningError(ErrorKind::kSelfIntersection, ring_name(k) + ": edges " + std::to_string(i) + " and " +
                                                              std::to_string(j) + " intersect");
      }
    }
  }
  if (signed_area(r) == 0.0) throw PlanningError(ErrorKind::kDegeneratePolygon, ring_name(k) + ": zero area");
}

bool rings_cross(const Ring& a, const Ring& b) {
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    for (std::size_t j = 0; j + 1 < b.size(); ++j)
      if (segments_intersect(a[i], a[i + 1], b[j], b[j + 1])) return true;
  return false;
}

const json& polygon_coords(const json& doc) {
  if (!doc.is_object()) parse_fail("expected a GeoJSON object");
  const auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) parse_fail("missing \"type\"");
  const std::string t = *type;
  if (t == "FeatureCollection") {
    const auto f = doc.find("features");
    if (f == doc.end() || !f->is_array() || f->size() != 1) parse_fail("FeatureCollection must hold exactly one feature");
    return polygon_coords((*f)[0]);
  }
  if (t == "Feature") {
    const auto g = doc.find("geometry");
    if (g == doc.end()) parse_fail("Feature without geometry");
    return polygon_coords(*g);
  }
  const auto c = doc.find("coordinates");
  if (c == doc.end() || !c->is_array()) parse_fail(t + " without coordinates");
  if (t == "Polygon") return *c;
  if (t == "MultiPolygon") {
    if (c->size() != 1) parse_fail("MultiPolygon must hold exactly one polygon");
    return (*c)[0];
  }
  parse_fail("unsupported geometry type \"" + t + "\"");
}

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

}  // namespace

geo::GeoPolygon parse_boundary(const json& doc, std::vector<std::string>* warnings) {
  const json& rings = polygon_coords(doc);
  if (rings.empty()) parse_fail("polygon has no rings");
  std::vector<Ring> parsed;
  for (std::size_t k = 0; k < rings.size(); ++k) {
    parsed.push_back(read_ring(rings[k], k, warnings));
    check_simple(parsed.back(), k);
    const bool ccw = signed_area(parsed.back()) > 0.0;
    if (ccw != (k == 0)) std::reverse(parsed.back().begin(), parsed.back().end());
  }
  for (std::size_t k = 1; k < parsed.size(); ++k) {
    if (rings_cross(parsed[0], parsed[k]) || !inside(parsed[0], parsed[k][0])) {
      throw PlanningError(ErrorKind::kHoleOutsideBoundary, ring_name(k) + " is not inside the boundary ring");
    }
    for (std::size_t m = 1; m < k; ++m) {
      if (rings_cross(parsed[m], parsed[k])) {
        throw PlanningError(ErrorKind::kSelfIntersection, ring_name(m) + " and " + ring_name(k) + " overlap");
      }
    }
  }
  geo::GeoPolygon out;
  out.boundary = std::move(parsed[0]);
  out.holes.assign(std::make_move_iterator(parsed.begin() + 1), std::make_move_iterator(parsed.end()));
  return out;
}

geo::GeoPolygon parse_boundary(const std::string& text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    parse_fail("invalid JSON at line " + std::to_string(line) + ": " + e.what());
  }
  return parse_boundary(doc, warnings);
}

geo::GeoPolygon load_boundary(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlanningError(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_boundary(ss.str(), warnings);
}

json boundary_json(const geo::GeoPolygon& polygon) {
  auto ring = [](const Ring& r) {
    json a = json::array();
    for (const GeoPoint& p : r) a.push_back({p.lon, p.lat});
    return a;
  };
  json coords = json::array({ring(polygon.boundary)});
  for (const auto& h : polygon.holes) coords.push_back(ring(h));
  return {{"type", "Polygon"}, {"coordinates", coords}};
}

WaypointList to_waypoints(const pathgen::CoveragePlan& plan) {
  WaypointList out;
  for (const auto& seg : plan.segments)
    for (const auto& p : seg.points) out.push_back({geo::to_geodetic(plan.frame, p), seg.mode});
  return out;
}

std::optional<ExportFormat> parse_export_format(const std::string& s) {
  if (s == "geojson") return ExportFormat::kGeoJson;
  if (s == "csv") return ExportFormat::kCsv;
  return std::nullopt;
}

std::string waypoints_csv(const WaypointList& wpts) {
  std::string out = "lat,lon,mode\n";
  for (const Waypoint& w : wpts) {
    out += fixed9(w.p.lat) + "," + fixed9(w.p.lon) + "," + pathgen::to_string(w.mode) + "\n";
  }
  return out;
}

std::string waypoints_geojson(const WaypointList& wpts) {
  json features = json::array();
  for (std::size_t i = 0; i < wpts.size();) {
    std::size_t j = i;
    json coords = json::array();
    while (j < wpts.size() && wpts[j].mode == wpts[i].mode) {
      coords.push_back({wpts[j].p.lon, wpts[j].p.lat});
      ++j;
    }
    features.push_back({{"type", "Feature"},
                        {"properties", {{"mode", pathgen::to_string(wpts[i].mode)}}},
                        {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
    i = j;
  }
  return json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) + "\n";
}

std::string format_waypoints(const WaypointList& wpts, ExportFormat format) {
  return format == ExportFormat::kCsv ? waypoints_csv(wpts) : waypoints_geojson(wpts);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PlanningError(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw PlanningError(ErrorKind::kIo, "write failed for " + path.string());
}

void export_waypoints(const WaypointList& wpts, ExportFormat format, const std::filesystem::path& path) {
  if (wpts.empty()) throw PlanningError(ErrorKind::kInvalidInput, "no waypoints to export");
  write_file(path, format_waypoints(wpts, format));
}

}  // namespace mowplan::io
