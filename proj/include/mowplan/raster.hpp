#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mowplan/geo.hpp"

namespace mowplan::raster {

using geo::LocalPoint;

/// State of one raster cell: NonLawn, unlabeled Lawn, or a labeled region.
class CellState {
 public:
  constexpr CellState() = default;

  static constexpr CellState non_lawn() { return CellState(0); }
  static constexpr CellState lawn() { return CellState(-1); }
  static constexpr CellState region(std::int32_t id) { return CellState(id); }

  constexpr bool is_non_lawn() const { return value_ == 0; }
  constexpr bool is_lawn() const { return value_ == -1; }
  constexpr bool is_region() const { return value_ > 0; }
  /// Lawn or labeled region.
  constexpr bool is_free() const { return value_ != 0; }
  constexpr std::int32_t region_id() const { return value_ > 0 ? value_ : 0; }

  friend constexpr bool operator==(CellState, CellState) = default;

 private:
  constexpr explicit CellState(std::int32_t v) : value_(v) {}
  std::int32_t value_ = 0;
};

struct CellIndex {
  int col = 0;
  int row = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Dense raster. Cell (col, row) has its center at
/// origin + (col * resolution, row * resolution); rows grow northwards.
struct GridMap {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  LocalPoint origin;
  std::vector<CellState> cells;

  GridMap() = default;
  GridMap(int w, int h, double res, LocalPoint org, CellState fill = CellState::non_lawn());

  bool contains(int col, int row) const {
    return col >= 0 && row >= 0 && col < width && row < height;
  }
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(col);
  }
  CellState at(int col, int row) const { return cells[index(col, row)]; }
  CellState& at(int col, int row) { return cells[index(col, row)]; }

  LocalPoint center(int col, int row) const {
    return {origin.x + col * resolution, origin.y + row * resolution};
  }
  /// Cell whose center is nearest to `p`, if that cell exists.
  std::optional<CellIndex> cell_of(const LocalPoint& p) const;

  std::size_t count_free() const;
};

/// Inclusive run of rows.
struct Interval {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Copy of a grid rotated about its center; maps rotated cells back to the
/// source frame analytically.
class RotatedView {
 public:
  RotatedView(GridMap grid, double theta_deg, double cos_phi, double sin_phi, LocalPoint pivot);

  const GridMap& grid() const { return grid_; }
  GridMap& grid() { return grid_; }
  double angle() const { return theta_; }

  /// Center of rotated cell (col, row) expressed in the source frame.
  LocalPoint to_original(double col, double row) const;
  /// Fractional rotated cell coordinates of a source-frame point.
  std::pair<double, double> to_rotated(const LocalPoint& p) const;

 private:
  GridMap grid_;
  double theta_;
  double cos_;
  double sin_;
  LocalPoint pivot_;
};

inline constexpr std::size_t kMaxGridCells = 16u * 1024u * 1024u;
inline constexpr double kDefaultResolution = 0.1;

/// Cells whose centers lie inside the boundary and outside every hole become
/// Lawn. One NonLawn cell of padding surrounds the polygon.
GridMap rasterize(const geo::LocalPolygon& polygon, double resolution);

/// Rotates by (90 - theta) degrees counterclockwise with nearest-neighbour
/// sampling; the output is sized to the rotated bounding box.
RotatedView rotate_grid(const GridMap& grid, double theta_deg);

/// Rasterizes `polygon` rotated by (90 - theta) degrees counterclockwise
/// about `pivot`, sampling cell centers along vertical scanlines. The view maps
/// back exactly like rotate_grid's, without resampling an existing raster.
RotatedView rasterize_rotated(const geo::LocalPolygon& polygon, double resolution, double theta_deg,
                              LocalPoint pivot);

/// Column runs of the same raster rasterize_rotated would produce, without
/// materializing the grid.
std::vector<std::vector<Interval>> rotated_column_runs(const geo::LocalPolygon& polygon, double resolution,
                                                       double theta_deg, LocalPoint pivot);

/// Metric center of the grid; the pivot used by rotate_grid.
LocalPoint grid_center(const GridMap& grid);

/// 4-connected labeling of free cells. Ids start at 1 and follow the first
/// occurrence in column-major scan order.
GridMap label_components(const GridMap& grid);

/// Maximal runs of free cells in `column`, ascending.
std::vector<Interval> free_intervals(const GridMap& grid, int column);

/// Euclidean distance (in cells) from every cell to the nearest cell flagged
/// in `feature`. Cells without any feature in the grid get +infinity.
std::vector<double> distance_field(int width, int height, std::span<const std::uint8_t> feature);

/// Binary PGM (P5): NonLawn 0, Lawn 255, regions scaled into 1..254.
/// The first image row is the northernmost grid row.
std::string to_pgm(const GridMap& grid);
void write_pgm(const GridMap& grid, const std::string& path);

}  // namespace mowplan::raster
