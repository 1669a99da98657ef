#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mowplan/pipeline.hpp"

namespace mowplan::io {

inline constexpr const char* kBenchmarkHeader =
    "map,merging,angle_mode,status,theta,region_count,mowing_distance,non_mowing_distance,coverage_percent,"
    "distance_per_coverage,turn_count,error";

/// For each map, runs {merge off, on} x {fixed 0 degrees, sweep} on top of
/// `config` and returns one CSV row per run. Failures become rows with
/// status "failed" and the error message; the remaining runs continue.
std::string run_benchmark(const std::vector<std::filesystem::path>& maps, const JobConfig& config);

/// *.geojson files in `dir`, sorted by name.
std::vector<std::filesystem::path> list_maps(const std::filesystem::path& dir);

}  // namespace mowplan::io
