#include <csignal>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "mowplan/benchmark.hpp"
#include "mowplan/pipeline.hpp"
#include "mowplan/service.hpp"
#include "mowplan/svg.hpp"

using namespace mowplan;

namespace {

struct PlanArgs {
  std::string input, output, format, svg, config_file, turn_type, start_corner;
  double resolution = 0, width = 0, overlap = 0, offset = 0, radius = 0, angle = 0, step = 0;
  bool no_merge = false, sweep = false;
};

// Flags given on the command line win over the config file.
io::JobConfig resolve(const CLI::App& cmd, const PlanArgs& a) {
  io::JobConfig c = a.config_file.empty() ? io::JobConfig{} : io::load_config(a.config_file);
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--resolution")) c.resolution = a.resolution;
  if (given("--width")) c.profile.mowing_width = a.width;
  if (given("--overlap")) c.profile.overlap = a.overlap;
  if (given("--offset")) c.profile.boundary_offset = a.offset;
  if (given("--turn-radius")) c.profile.turn_radius = a.radius;
  if (given("--turn-type")) c.profile.turn_type = *pathgen::parse_turn_type(a.turn_type);
  if (given("--start-corner")) c.start_corner = *io::parse_start_corner(a.start_corner);
  if (a.no_merge) c.merging = false;
  if (given("--angle")) {
    c.angle_mode = io::AngleMode::kFixed;
    c.fixed_angle = a.angle;
  }
  if (a.sweep) c.angle_mode = io::AngleMode::kSweep;
  if (given("--angle-step")) c.angle_step = a.step;
  return c;
}

void add_job_flags(CLI::App* cmd, PlanArgs& a) {
  cmd->add_option("--config", a.config_file, "JSON config file (flags override it)")->check(CLI::ExistingFile);
  cmd->add_option("--resolution", a.resolution, "Raster cell size in meters");
  cmd->add_option("--width", a.width, "Mowing width in meters");
  cmd->add_option("--overlap", a.overlap, "Overlap between adjacent swaths in meters");
  cmd->add_option("--offset", a.offset, "Clearance kept from the boundary in meters");
  cmd->add_option("--turn-radius", a.radius, "Minimum turning radius in meters");
  cmd->add_option("--turn-type", a.turn_type, "uturn or threepoint")->check(CLI::IsMember({"uturn", "threepoint"}));
  cmd->add_option("--start-corner", a.start_corner, "nw, ne, sw, se or first-vertex")
      ->check(CLI::IsMember({"nw", "ne", "sw", "se", "first-vertex"}));
  cmd->add_flag("--no-merge", a.no_merge, "Keep every decomposed region");
  auto* angle = cmd->add_option("--angle", a.angle, "Fixed decomposition angle in degrees")->check(CLI::Range(0.0, 180.0));
  auto* sweep = cmd->add_flag("--sweep", a.sweep, "Search all angles (default)");
  angle->excludes(sweep);
  cmd->add_option("--angle-step", a.step, "Angle step of the sweep in degrees");
}

int fail(const PlanningError& e) {
  std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
  return io::exit_code(e.kind());
}

volatile std::sig_atomic_t g_stop = 0;
service::Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage path planner for robotic mowers"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Plan a coverage path for one boundary");
  plan->add_option("--input", plan_args.input, "Boundary polygon (GeoJSON)")->required();
  plan->add_option("--output", plan_args.output, "Waypoint file")->required();
  plan->add_option("--format", plan_args.format, "geojson or csv (default: from extension)")
      ->check(CLI::IsMember({"geojson", "csv"}));
  plan->add_option("--svg", plan_args.svg, "Write an SVG preview");
  add_job_flags(plan, plan_args);

  PlanArgs bench_args;
  std::string maps_dir, bench_out;
  auto* bench = app.add_subcommand("bench", "Run the merge/angle grid over a directory of maps");
  bench->add_option("--maps", maps_dir, "Directory of *.geojson maps")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--out", bench_out, "CSV output file")->required();
  add_job_flags(bench, bench_args);

  int port = 8080;
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the planning HTTP service");
  serve->add_option("--port", port, "Listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--static", static_dir, "Directory served at /")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*plan) {
      const io::JobConfig config = resolve(*plan, plan_args);
      std::vector<std::string> warnings;
      const auto polygon = io::load_boundary(plan_args.input, &warnings);
      const auto result = io::run_pipeline(config, polygon);
      std::string format = plan_args.format;
      if (format.empty()) format = std::filesystem::path(plan_args.output).extension() == ".csv" ? "csv" : "geojson";
      io::export_waypoints(result.waypoints, *io::parse_export_format(format), plan_args.output);
      if (!plan_args.svg.empty()) {
        io::write_file(plan_args.svg, io::render_preview(result.plan, result.decomp, result.grid));
      }
      warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      nlohmann::json summary = io::metrics_json(result.metrics);
      summary["theta"] = result.decomp.theta;
      std::cout << summary.dump(2) << "\n";
      return 0;
    }
    if (*bench) {
      const io::JobConfig config = resolve(*bench, bench_args);
      config.validate();
      const auto maps = io::list_maps(maps_dir);
      if (maps.empty()) {
        std::cerr << "error: no *.geojson maps in " << maps_dir << "\n";
        return 1;
      }
      const std::string csv = io::run_benchmark(maps, config);
      io::write_file(bench_out, csv);
      std::cout << csv;
      return 0;
    }
    if (*serve) {
      service::ServerOptions options;
      options.port = port;
      options.static_dir = static_dir;
      service::Server server(options);
      const int bound = server.bind();
      g_server = &server;
      std::signal(SIGINT, [](int) {
        g_stop = 1;
        if (g_server) g_server->stop();
      });
      std::cerr << "listening on port " << bound << "\n";
      server.listen();
      g_server = nullptr;
      return 0;
    }
  } catch (const PlanningError& e) {
    return fail(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 1;
}
