#include "mowplan/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "mowplan/error.hpp"

namespace mowplan::raster {

GridMap::GridMap(int w, int h, double res, LocalPoint org, CellState fill)
    : width(w), height(h), resolution(res), origin(org),
      cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

std::optional<CellIndex> GridMap::cell_of(const LocalPoint& p) const {
  const double c = std::round((p.x - origin.x) / resolution);
  const double r = std::round((p.y - origin.y) / resolution);
  if (!(c >= 0.0 && r >= 0.0 && c < width && r < height)) return std::nullopt;
  return CellIndex{static_cast<int>(c), static_cast<int>(r)};
}

std::size_t GridMap::count_free() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](CellState s) { return s.is_free(); }));
}

namespace {

void validate_ring(const geo::LocalRing& ring, const char* what) {
  if (ring.size() < 3) {
    throw PlanningError(ErrorKind::kDegeneratePolygon, std::string(what) + " ring has fewer than 3 vertices");
  }
  for (const LocalPoint& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw PlanningError(ErrorKind::kDegeneratePolygon, std::string(what) + " ring has a non-finite vertex");
    }
  }
  if (std::abs(geo::signed_area(ring)) <= 1e-12) {
    throw PlanningError(ErrorKind::kDegeneratePolygon, std::string(what) + " ring has zero area");
  }
}

// Exact sin/cos for multiples of 90 degrees so axis-aligned rotations are
// lossless.
std::pair<double, double> cos_sin_deg(double deg) {
  const double q = deg / 90.0;
  if (std::abs(q - std::round(q)) < 1e-12) {
    switch (((static_cast<long>(std::lround(q)) % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double rad = deg * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

// One-dimensional squared distance transform (Felzenszwalb & Huttenlocher).
// Non-feature samples carry kFar instead of infinity to keep the parabola
// intersections finite.
constexpr double kFar = 1e20;

void edt_1d(const double* f, double* d, int n, int* v, double* z) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    auto intersect = [&](int p) {
      return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
             (2.0 * (q - p));
    };
    double s = intersect(v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace

GridMap rasterize(const geo::LocalPolygon& polygon, double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw PlanningError(ErrorKind::kInvalidInput, "resolution must be positive");
  }
  validate_ring(polygon.outer, "boundary");
  for (const auto& hole : polygon.holes) validate_ring(hole, "hole");

  double min_x = polygon.outer.front().x, max_x = min_x;
  double min_y = polygon.outer.front().y, max_y = min_y;
  for (const LocalPoint& p : polygon.outer) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double nx_real = std::max(1.0, std::ceil((max_x - min_x) / resolution - 1e-9));
  const double ny_real = std::max(1.0, std::ceil((max_y - min_y) / resolution - 1e-9));
  if ((nx_real + 2.0) * (ny_real + 2.0) > static_cast<double>(kMaxGridCells)) {
    throw PlanningError(ErrorKind::kGridTooLarge, "raster would exceed 16M cells; use a coarser resolution");
  }
  const int nx = static_cast<int>(nx_real);
  const int ny = static_cast<int>(ny_real);
  const double first_x = min_x + 0.5 * ((max_x - min_x) - nx * resolution) + 0.5 * resolution;
  const double first_y = min_y + 0.5 * ((max_y - min_y) - ny * resolution) + 0.5 * resolution;

  GridMap grid(nx + 2, ny + 2, resolution, {first_x - resolution, first_y - resolution});

  std::vector<const geo::LocalRing*> rings{&polygon.outer};
  for (const auto& hole : polygon.holes) rings.push_back(&hole);

  std::vector<double> crossings;
  for (int row = 1; row <= ny; ++row) {
    const double y = grid.origin.y + row * resolution;
    crossings.clear();
    for (const geo::LocalRing* ring : rings) {
      const std::size_t n = ring->size();
      for (std::size_t i = 0; i < n; ++i) {
        const LocalPoint& a = (*ring)[i];
        const LocalPoint& b = (*ring)[(i + 1) % n];
        if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
          crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int c0 = std::max(1, static_cast<int>(std::ceil((crossings[k] - grid.origin.x) / resolution)));
      const int c1 = std::min(nx, static_cast<int>(std::ceil((crossings[k + 1] - grid.origin.x) / resolution)) - 1);
      for (int col = c0; col <= c1; ++col) grid.at(col, row) = CellState::lawn();
    }
  }
  return grid;
}

RotatedView::RotatedView(GridMap grid, double theta_deg, double cos_phi, double sin_phi, LocalPoint pivot)
    : grid_(std::move(grid)), theta_(theta_deg), cos_(cos_phi), sin_(sin_phi), pivot_(pivot) {}

LocalPoint RotatedView::to_original(double col, double row) const {
  const double rx = grid_.origin.x + col * grid_.resolution;
  const double ry = grid_.origin.y + row * grid_.resolution;
  // inverse rotation R(-phi)
  return {pivot_.x + cos_ * rx + sin_ * ry, pivot_.y - sin_ * rx + cos_ * ry};
}

std::pair<double, double> RotatedView::to_rotated(const LocalPoint& p) const {
  const double dx = p.x - pivot_.x;
  const double dy = p.y - pivot_.y;
  const double rx = cos_ * dx - sin_ * dy;
  const double ry = sin_ * dx + cos_ * dy;
  return {(rx - grid_.origin.x) / grid_.resolution, (ry - grid_.origin.y) / grid_.resolution};
}

LocalPoint grid_center(const GridMap& grid) {
  return {grid.origin.x + 0.5 * (grid.width - 1) * grid.resolution,
          grid.origin.y + 0.5 * (grid.height - 1) * grid.resolution};
}

namespace {

struct RotatedLayout {
  geo::LocalPolygon polygon;  // in rotated metric coordinates
  int width = 0;
  int height = 0;
  LocalPoint origin;
  double cos_phi = 1.0;
  double sin_phi = 0.0;
};

RotatedLayout layout_rotated(const geo::LocalPolygon& polygon, double resolution, double theta_deg,
                             LocalPoint pivot) {
  if (!(resolution > 0.0)) throw PlanningError(ErrorKind::kInvalidInput, "resolution must be positive");
  validate_ring(polygon.outer, "boundary");
  for (const auto& hole : polygon.holes) validate_ring(hole, "hole");
  RotatedLayout out;
  std::tie(out.cos_phi, out.sin_phi) = cos_sin_deg(90.0 - theta_deg);
  auto rot = [&](const geo::LocalRing& ring) {
    geo::LocalRing r;
    r.reserve(ring.size());
    for (const LocalPoint& p : ring) {
      const double dx = p.x - pivot.x, dy = p.y - pivot.y;
      r.push_back({out.cos_phi * dx - out.sin_phi * dy, out.sin_phi * dx + out.cos_phi * dy});
    }
    return r;
  };
  out.polygon.outer = rot(polygon.outer);
  for (const auto& h : polygon.holes) out.polygon.holes.push_back(rot(h));

  double min_x = out.polygon.outer.front().x, max_x = min_x;
  double min_y = out.polygon.outer.front().y, max_y = min_y;
  for (const LocalPoint& p : out.polygon.outer) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double nx = std::max(1.0, std::ceil((max_x - min_x) / resolution - 1e-9));
  const double ny = std::max(1.0, std::ceil((max_y - min_y) / resolution - 1e-9));
  if ((nx + 2.0) * (ny + 2.0) > static_cast<double>(kMaxGridCells)) {
    throw PlanningError(ErrorKind::kGridTooLarge, "raster would exceed 16M cells; use a coarser resolution");
  }
  out.width = static_cast<int>(nx) + 2;
  out.height = static_cast<int>(ny) + 2;
  out.origin = {min_x + 0.5 * ((max_x - min_x) - nx * resolution) - 0.5 * resolution,
                min_y + 0.5 * ((max_y - min_y) - ny * resolution) - 0.5 * resolution};
  return out;
}

std::vector<std::vector<Interval>> scan_columns(const RotatedLayout& layout, double resolution) {
  std::vector<const geo::LocalRing*> rings{&layout.polygon.outer};
  for (const auto& hole : layout.polygon.holes) rings.push_back(&hole);

  std::vector<std::vector<Interval>> columns(static_cast<std::size_t>(layout.width));
  std::vector<double> crossings;
  for (int col = 1; col + 1 < layout.width; ++col) {
    const double x = layout.origin.x + col * resolution;
    crossings.clear();
    for (const geo::LocalRing* ring : rings) {
      const std::size_t n = ring->size();
      for (std::size_t i = 0; i < n; ++i) {
        const LocalPoint& a = (*ring)[i];
        const LocalPoint& b = (*ring)[(i + 1) % n];
        if ((a.x <= x && x < b.x) || (b.x <= x && x < a.x)) {
          crossings.push_back(a.y + (x - a.x) * (b.y - a.y) / (b.x - a.x));
        }
      }
    }
    std::sort(crossings.begin(), crossings.end());
    auto& runs = columns[col];
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int r0 = std::max(1, static_cast<int>(std::ceil((crossings[k] - layout.origin.y) / resolution)));
      const int r1 = std::min(layout.height - 2,
                              static_cast<int>(std::ceil((crossings[k + 1] - layout.origin.y) / resolution)) - 1);
      if (r0 > r1) continue;
      if (!runs.empty() && r0 <= runs.back().end + 1) {
        runs.back().end = std::max(runs.back().end, r1);
      } else {
        runs.push_back({r0, r1});
      }
    }
  }
  return columns;
}

}  // namespace

std::vector<std::vector<Interval>> rotated_column_runs(const geo::LocalPolygon& polygon, double resolution,
                                                       double theta_deg, LocalPoint pivot) {
  return scan_columns(layout_rotated(polygon, resolution, theta_deg, pivot), resolution);
}

RotatedView rasterize_rotated(const geo::LocalPolygon& polygon, double resolution, double theta_deg,
                              LocalPoint pivot) {
  const RotatedLayout layout = layout_rotated(polygon, resolution, theta_deg, pivot);
  GridMap grid(layout.width, layout.height, resolution, layout.origin);
  const auto columns = scan_columns(layout, resolution);
  for (int col = 0; col < layout.width; ++col) {
    for (const Interval& run : columns[col]) {
      for (int row = run.start; row <= run.end; ++row) grid.at(col, row) = CellState::lawn();
    }
  }
  return RotatedView(std::move(grid), theta_deg, layout.cos_phi, layout.sin_phi, pivot);
}

RotatedView rotate_grid(const GridMap& grid, double theta_deg) {
  const auto [c, s] = cos_sin_deg(90.0 - theta_deg);
  const double res = grid.resolution;
  const LocalPoint pivot = grid_center(grid);

  if (c == 1.0 && s == 0.0) {
    GridMap copy = grid;
    copy.origin = {-0.5 * (grid.width - 1) * res, -0.5 * (grid.height - 1) * res};
    return RotatedView(std::move(copy), theta_deg, c, s, pivot);
  }

  const double half_w = 0.5 * grid.width;
  const double half_h = 0.5 * grid.height;
  const int out_w = std::max(1, static_cast<int>(std::ceil(2.0 * (std::abs(c) * half_w + std::abs(s) * half_h) - 1e-9)));
  const int out_h = std::max(1, static_cast<int>(std::ceil(2.0 * (std::abs(s) * half_w + std::abs(c) * half_h) - 1e-9)));

  GridMap out(out_w, out_h, res, {-0.5 * (out_w - 1) * res, -0.5 * (out_h - 1) * res});

  // Work in cell units: source (col, row) = center + R(-phi) * rotated offset.
  const double src_cc = 0.5 * (grid.width - 1);
  const double src_rc = 0.5 * (grid.height - 1);
  const double out_cc = 0.5 * (out_w - 1);
  const double out_rc = 0.5 * (out_h - 1);
  for (int row = 0; row < out_h; ++row) {
    const double dy = row - out_rc;
    for (int col = 0; col < out_w; ++col) {
      const double dx = col - out_cc;
      const double sc = src_cc + c * dx + s * dy;
      const double sr = src_rc - s * dx + c * dy;
      const long ic = std::lround(sc);
      const long ir = std::lround(sr);
      if (ic < 0 || ir < 0 || ic >= grid.width || ir >= grid.height) continue;
      if (grid.at(static_cast<int>(ic), static_cast<int>(ir)).is_free()) {
        out.at(col, row) = CellState::lawn();
      }
    }
  }
  return RotatedView(std::move(out), theta_deg, c, s, pivot);
}

GridMap label_components(const GridMap& grid) {
  GridMap out = grid;
  for (CellState& cell : out.cells) {
    if (cell.is_free()) cell = CellState::lawn();
  }
  std::vector<CellIndex> stack;
  std::int32_t next_id = 1;
  for (int col = 0; col < out.width; ++col) {
    for (int row = 0; row < out.height; ++row) {
      if (!out.at(col, row).is_lawn()) continue;
      const CellState label = CellState::region(next_id++);
      out.at(col, row) = label;
      stack.push_back({col, row});
      while (!stack.empty()) {
        const CellIndex cur = stack.back();
        stack.pop_back();
        constexpr int kDc[4] = {1, -1, 0, 0};
        constexpr int kDr[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nc = cur.col + kDc[k];
          const int nr = cur.row + kDr[k];
          if (out.contains(nc, nr) && out.at(nc, nr).is_lawn()) {
            out.at(nc, nr) = label;
            stack.push_back({nc, nr});
          }
        }
      }
    }
  }
  return out;
}

std::vector<Interval> free_intervals(const GridMap& grid, int column) {
  std::vector<Interval> runs;
  if (column < 0 || column >= grid.width) return runs;
  int row = 0;
  while (row < grid.height) {
    while (row < grid.height && !grid.at(column, row).is_free()) ++row;
    if (row >= grid.height) break;
    const int start = row;
    while (row < grid.height && grid.at(column, row).is_free()) ++row;
    runs.push_back({start, row - 1});
  }
  return runs;
}

std::vector<double> distance_field(int width, int height, std::span<const std::uint8_t> feature) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> grid(total);
  for (std::size_t i = 0; i < total; ++i) grid[i] = feature[i] ? 0.0 : kFar;

  const int n = std::max(width, height);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  for (int col = 0; col < width; ++col) {
    for (int row = 0; row < height; ++row) f[row] = grid[static_cast<std::size_t>(row) * width + col];
    edt_1d(f.data(), d.data(), height, v.data(), z.data());
    for (int row = 0; row < height; ++row) grid[static_cast<std::size_t>(row) * width + col] = d[row];
  }
  for (int row = 0; row < height; ++row) {
    double* line = grid.data() + static_cast<std::size_t>(row) * width;
    std::copy(line, line + width, f.begin());
    edt_1d(f.data(), d.data(), width, v.data(), z.data());
    std::copy(d.begin(), d.begin() + width, line);
  }
  for (double& value : grid) value = value >= 0.5 * kFar ? kInf : std::sqrt(value);
  return grid;
}

std::string to_pgm(const GridMap& grid) {
  std::int32_t max_id = 0;
  for (CellState s : grid.cells) max_id = std::max(max_id, s.region_id());

  std::string out = "P5\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
  out.reserve(out.size() + grid.cells.size());
  for (int row = grid.height - 1; row >= 0; --row) {
    for (int col = 0; col < grid.width; ++col) {
      const CellState s = grid.at(col, row);
      unsigned char gray = 0;
      if (s.is_lawn()) {
        gray = 255;
      } else if (s.is_region()) {
        const std::int32_t span = std::max<std::int32_t>(1, max_id - 1);
        gray = static_cast<unsigned char>(1 + (static_cast<std::int64_t>(s.region_id() - 1) * 253) / span);
      }
      out.push_back(static_cast<char>(gray));
    }
  }
  return out;
}

void write_pgm(const GridMap& grid, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw PlanningError(ErrorKind::kIo, "cannot open " + path + " for writing");
  const std::string data = to_pgm(grid);
  file.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!file) throw PlanningError(ErrorKind::kIo, "failed writing " + path);
}

}  // namespace mowplan::raster
