#include "mowplan/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mowplan::io {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw PlanningError(ErrorKind::kInvalidInput, msg); }

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PlanningError& e) {
    if (!e.stage().empty()) throw;
    throw PlanningError(e.kind(), stage, e.what());
  }
}

double number(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw PlanningError(ErrorKind::kParse, std::string("config: \"") + key + "\" must be a number");
  return v.get<double>();
}

std::string text(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw PlanningError(ErrorKind::kParse, std::string("config: \"") + key + "\" must be a string");
  return v.get<std::string>();
}

bool flag(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw PlanningError(ErrorKind::kParse, std::string("config: \"") + key + "\" must be true/false");
  return v.get<bool>();
}

geo::LocalPoint start_point(StartCorner corner, const geo::LocalPolygon& poly) {
  if (corner == StartCorner::kFirstVertex) return poly.outer.front();
  geo::LocalPoint lo = poly.outer.front(), hi = lo;
  for (const auto& p : poly.outer) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  switch (corner) {
    case StartCorner::kNW: return {lo.x, hi.y};
    case StartCorner::kNE: return hi;
    case StartCorner::kSE: return {hi.x, lo.y};
    default: return lo;
  }
}

}  // namespace

const char* to_string(StartCorner c) {
  switch (c) {
    case StartCorner::kNW: return "nw";
    case StartCorner::kNE: return "ne";
    case StartCorner::kSW: return "sw";
    case StartCorner::kSE: return "se";
    case StartCorner::kFirstVertex: return "first-vertex";
  }
  return "sw";
}

std::optional<StartCorner> parse_start_corner(const std::string& s) {
  for (StartCorner c : {StartCorner::kNW, StartCorner::kNE, StartCorner::kSW, StartCorner::kSE,
                        StartCorner::kFirstVertex}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

void JobConfig::validate() const {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) bad("resolution must be positive");
  if (!(angle_step > 0.0) || angle_step > 180.0) bad("angle step must be in (0, 180]");
  if (angle_mode == AngleMode::kFixed && !(fixed_angle >= 0.0 && fixed_angle <= 180.0)) {
    bad("fixed angle must be in [0, 180]");
  }
  profile.validate();
}

JobConfig apply_config(JobConfig c, const json& obj) {
  if (!obj.is_object()) throw PlanningError(ErrorKind::kParse, "config must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (key == "resolution") {
      c.resolution = number(obj, "resolution");
    } else if (key == "width") {
      c.profile.mowing_width = number(obj, "width");
    } else if (key == "overlap") {
      c.profile.overlap = number(obj, "overlap");
    } else if (key == "offset") {
      c.profile.boundary_offset = number(obj, "offset");
    } else if (key == "turn_radius") {
      c.profile.turn_radius = number(obj, "turn_radius");
    } else if (key == "turn_type") {
      const auto t = pathgen::parse_turn_type(text(obj, "turn_type"));
      if (!t) throw PlanningError(ErrorKind::kParse, "config: turn_type must be uturn or threepoint");
      c.profile.turn_type = *t;
    } else if (key == "merge") {
      c.merging = flag(obj, "merge");
    } else if (key == "angle") {
      c.angle_mode = AngleMode::kFixed;
      c.fixed_angle = number(obj, "angle");
    } else if (key == "sweep") {
      if (flag(obj, "sweep")) c.angle_mode = AngleMode::kSweep;
    } else if (key == "angle_step") {
      c.angle_step = number(obj, "angle_step");
    } else if (key == "start_corner") {
      const auto s = parse_start_corner(text(obj, "start_corner"));
      if (!s) throw PlanningError(ErrorKind::kParse, "config: start_corner must be nw, ne, sw, se or first-vertex");
      c.start_corner = *s;
    } else {
      throw PlanningError(ErrorKind::kParse, "config: unknown key \"" + key + "\"");
    }
  }
  if (obj.contains("angle") && obj.contains("sweep") && obj["sweep"].get<bool>()) {
    throw PlanningError(ErrorKind::kParse, "config: \"angle\" and \"sweep\" are exclusive");
  }
  return c;
}

json config_json(const JobConfig& c) {
  json out = {{"resolution", c.resolution},
              {"width", c.profile.mowing_width},
              {"overlap", c.profile.overlap},
              {"offset", c.profile.boundary_offset},
              {"turn_radius", c.profile.turn_radius},
              {"turn_type", pathgen::to_string(c.profile.turn_type)},
              {"merge", c.merging},
              {"angle_step", c.angle_step},
              {"start_corner", to_string(c.start_corner)}};
  if (c.angle_mode == AngleMode::kFixed) {
    out["angle"] = c.fixed_angle;
  } else {
    out["sweep"] = true;
  }
  return out;
}

JobConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlanningError(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw PlanningError(ErrorKind::kParse, "config " + path.string() + ": " + e.what());
  }
  return apply_config(JobConfig{}, doc);
}

PipelineResult run_pipeline(const JobConfig& config, const geo::GeoPolygon& polygon) {
  staged("config", [&] { config.validate(); });
  PipelineResult r;
  const geo::LocalFrame frame = staged("transform", [&] { return geo::make_frame(polygon); });
  r.local = staged("transform", [&] { return geo::to_local(frame, polygon); });
  r.grid = staged("rasterize", [&] { return raster::rasterize(r.local, config.resolution); });
  staged("decompose", [&] {
    if (config.angle_mode == AngleMode::kSweep) {
      auto sweep = decompose::adaptive_decomposition(r.local, r.grid, config.merging, config.angle_step);
      r.decomp = std::move(sweep.best);
      r.per_angle = std::move(sweep.all);
    } else {
      r.decomp = decompose::decompose_merge(config.fixed_angle, r.local, r.grid, config.merging);
      r.per_angle[config.fixed_angle] = r.decomp.region_count;
    }
  });
  r.plan = staged("plan", [&] {
    return pathgen::build_plan(r.decomp, r.local, r.grid, config.profile, start_point(config.start_corner, r.local));
  });
  r.plan.frame = frame;
  r.metrics = staged("evaluate", [&] { return metrics::evaluate(r.plan, r.grid, config.profile); });
  r.waypoints = staged("export", [&] { return to_waypoints(r.plan); });
  r.warnings = r.plan.warnings;
  for (int id : r.decomp.non_sweepable) {
    r.warnings.push_back("region " + std::to_string(id) + " is not sweepable by straight tracks at the chosen angle");
  }
  return r;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return 2;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kOutOfRange:
    case ErrorKind::kDegeneratePolygon:
    case ErrorKind::kGridTooLarge:
    case ErrorKind::kSelfIntersection:
    case ErrorKind::kHoleOutsideBoundary: return 3;
    case ErrorKind::kTurnInfeasible:
    case ErrorKind::kDisconnectedLawn:
    case ErrorKind::kEmptyLawn:
    case ErrorKind::kUndefinedDistancePerCoverage: return 4;
    case ErrorKind::kIo: return 5;
  }
  return 4;
}

json metrics_json(const metrics::PlanMetrics& m) {
  return {{"coverage_percent", m.coverage_percent},
          {"mowing_distance", m.mowing_distance},
          {"non_mowing_distance", m.non_mowing_distance},
          {"turn_count", m.turn_count},
          {"distance_per_coverage", m.distance_per_coverage},
          {"region_count", m.region_count}};
}

json plan_json(const pathgen::CoveragePlan& plan) {
  json segs = json::array();
  for (const auto& s : plan.segments) {
    json pts = json::array();
    for (const auto& p : s.points) pts.push_back({p.x, p.y});
    segs.push_back({{"mode", pathgen::to_string(s.mode)}, {"region", s.region}, {"points", pts}});
  }
  return {{"theta", plan.theta}, {"region_count", plan.region_count}, {"segments", segs}};
}

}  // namespace mowplan::io
