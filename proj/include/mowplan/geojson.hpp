#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mowplan/geo.hpp"
#include "mowplan/pathgen.hpp"

namespace mowplan::io {

/// Parses a GeoJSON Polygon, a MultiPolygon holding one polygon, or a Feature /
/// FeatureCollection wrapping one. Open rings are closed (with a warning),
/// duplicate vertices dropped, the boundary made counterclockwise and holes
/// clockwise. Throws kParse, kDegeneratePolygon, kSelfIntersection or
/// kHoleOutsideBoundary.
geo::GeoPolygon parse_boundary(const nlohmann::json& doc, std::vector<std::string>* warnings = nullptr);
geo::GeoPolygon parse_boundary(const std::string& text, std::vector<std::string>* warnings = nullptr);
/// As parse_boundary, reading a file (kIo if it cannot be read).
geo::GeoPolygon load_boundary(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// GeoJSON Polygon geometry of a GeoPolygon.
nlohmann::json boundary_json(const geo::GeoPolygon& polygon);

struct Waypoint {
  geo::GeoPoint p;
  pathgen::SegmentMode mode = pathgen::SegmentMode::kMow;
};
using WaypointList = std::vector<Waypoint>;

/// Every plan vertex in order, mapped to geodetic coordinates.
WaypointList to_waypoints(const pathgen::CoveragePlan& plan);

enum class ExportFormat { kGeoJson, kCsv };
std::optional<ExportFormat> parse_export_format(const std::string& s);

/// `lat,lon,mode` rows with nine decimals.
std::string waypoints_csv(const WaypointList& wpts);
/// FeatureCollection with one LineString per run of equal mode.
std::string waypoints_geojson(const WaypointList& wpts);
std::string format_waypoints(const WaypointList& wpts, ExportFormat format);

/// Writes the formatted list. Throws kInvalidInput for an empty list (no file
/// is created) and kIo when the file cannot be written.
void export_waypoints(const WaypointList& wpts, ExportFormat format, const std::filesystem::path& path);

/// Writes text to a file or throws kIo.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mowplan::io
