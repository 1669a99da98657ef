#include "mowplan/benchmark.hpp"

#include <algorithm>
#include <cstdio>

namespace mowplan::io {

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Commas and quotes would break the row.
std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '\n') ch = ' ';
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::filesystem::path> list_maps(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".geojson") out.push_back(entry.path());
  }
  if (ec) throw PlanningError(ErrorKind::kIo, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

std::string run_benchmark(const std::vector<std::filesystem::path>& maps, const JobConfig& config) {
  std::string out = std::string(kBenchmarkHeader) + "\n";
  for (const auto& path : maps) {
    const std::string name = csv_field(path.stem().string());
    std::optional<geo::GeoPolygon> polygon;
    std::string load_error;
    try {
      polygon = load_boundary(path);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (bool merging : {false, true}) {
      for (AngleMode mode : {AngleMode::kFixed, AngleMode::kSweep}) {
        JobConfig c = config;
        c.merging = merging;
        c.angle_mode = mode;
        c.fixed_angle = 0.0;
        std::string row = name + "," + (merging ? "yes" : "no") + "," + (mode == AngleMode::kSweep ? "sweep" : "fixed0");
        try {
          if (!polygon) throw PlanningError(ErrorKind::kParse, "load", load_error);
          const PipelineResult r = run_pipeline(c, *polygon);
          const auto& m = r.metrics;
          row += ",ok," + fmt(r.decomp.theta, 1) + "," + std::to_string(m.region_count) + "," +
                 fmt(m.mowing_distance, 2) + "," + fmt(m.non_mowing_distance, 2) + "," + fmt(m.coverage_percent, 2) +
                 "," + fmt(m.distance_per_coverage, 4) + "," + std::to_string(m.turn_count) + ",";
        } catch (const std::exception& e) {
          row += ",failed,,,,,,,," + csv_field(e.what());
        }
        out += row + "\n";
      }
    }
  }
  return out;
}

}  // namespace mowplan::io
