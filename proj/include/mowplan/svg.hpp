#pragma once

#include <string>

#include "mowplan/decompose.hpp"
#include "mowplan/pathgen.hpp"

namespace mowplan::io {

/// Preview image in local meters (north up): lawn cells filled green,
/// one red path per pair of adjacent regions, Mow and Border polylines in
/// blue, Turn dashed blue, Travel yellow. Output is byte-stable.
std::string render_preview(const pathgen::CoveragePlan& plan, const decompose::Decomposition& decomp,
                           const raster::GridMap& grid);

}  // namespace mowplan::io
