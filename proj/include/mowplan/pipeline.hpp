#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mowplan/decompose.hpp"
#include "mowplan/error.hpp"
#include "mowplan/geojson.hpp"
#include "mowplan/metrics.hpp"
#include "mowplan/pathgen.hpp"

namespace mowplan::io {

enum class AngleMode { kSweep, kFixed };
enum class StartCorner { kNW, kNE, kSW, kSE, kFirstVertex };

const char* to_string(StartCorner c);
std::optional<StartCorner> parse_start_corner(const std::string& s);

struct JobConfig {
  double resolution = raster::kDefaultResolution;
  pathgen::MowerProfile profile;
  bool merging = true;
  AngleMode angle_mode = AngleMode::kSweep;
  double fixed_angle = 0.0;
  double angle_step = 1.0;
  StartCorner start_corner = StartCorner::kSW;

  /// Throws kInvalidInput.
  void validate() const;
  friend bool operator==(const JobConfig&, const JobConfig&) = default;
};

/// Overlays the keys present in `obj` onto `base`. Keys mirror the CLI flags:
/// resolution, width, overlap, offset, turn_radius, turn_type, merge, angle,
/// sweep, angle_step, start_corner. Unknown keys or wrong types throw kParse.
JobConfig apply_config(JobConfig base, const nlohmann::json& obj);
nlohmann::json config_json(const JobConfig& config);
JobConfig load_config(const std::filesystem::path& path);

struct PipelineResult {
  geo::LocalPolygon local;
  raster::GridMap grid;
  decompose::Decomposition decomp;
  /// Region count per evaluated angle.
  std::map<double, int> per_angle;
  pathgen::CoveragePlan plan;
  metrics::PlanMetrics metrics;
  WaypointList waypoints;
  std::vector<std::string> warnings;
};

/// transform → rasterize → decompose → plan → evaluate → waypoints. Errors are
/// rethrown with the failing stage as label.
PipelineResult run_pipeline(const JobConfig& config, const geo::GeoPolygon& polygon);

/// Process exit status for an error kind: 2 parse, 3 geometry, 4 planning,
/// 5 I/O. (0 is success and 1 a usage error.)
int exit_code(ErrorKind kind);

nlohmann::json metrics_json(const metrics::PlanMetrics& m);
/// Local-frame segments as {mode, region, points: [[x, y], ...]}.
nlohmann::json plan_json(const pathgen::CoveragePlan& plan);

}  // namespace mowplan::io
