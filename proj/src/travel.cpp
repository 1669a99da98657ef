#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mowplan/error.hpp"
#include "mowplan/pathgen.hpp"

namespace mowplan::pathgen {

namespace {

double dist(LocalPoint a, LocalPoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Search {
  const GridMap& grid;
  const std::vector<double>& clearance;
  double level;

  bool passable(int c, int r) const {
    return grid.contains(c, r) && clearance[grid.index(c, r)] > 0.0 && clearance[grid.index(c, r)] >= level - 1e-9;
  }

  // Nearest passable cell to p within a few cells of its own.
  std::optional<raster::CellIndex> snap(LocalPoint p) const {
    const int pc = static_cast<int>(std::lround((p.x - grid.origin.x) / grid.resolution));
    const int pr = static_cast<int>(std::lround((p.y - grid.origin.y) / grid.resolution));
    const int reach = static_cast<int>(std::ceil(level / grid.resolution)) + 3;
    std::optional<raster::CellIndex> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int dc = -reach; dc <= reach; ++dc) {
      for (int dr = -reach; dr <= reach; ++dr) {
        const int c = pc + dc, r = pr + dr;
        if (!passable(c, r)) continue;
        const double d = dist(grid.center(c, r), p);
        if (d < best_d) {
          best_d = d;
          best = raster::CellIndex{c, r};
        }
      }
    }
    return best;
  }

  bool visible(LocalPoint a, LocalPoint b) const {
    const double len = dist(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(len / (0.25 * grid.resolution))));
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      const auto cell = grid.cell_of({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
      if (!cell || !passable(cell->col, cell->row)) return false;
    }
    return true;
  }

  // 8-connected A*; diagonal moves need both orthogonal neighbours free.
  std::optional<std::vector<raster::CellIndex>> astar(raster::CellIndex s, raster::CellIndex g) const {
    const std::size_t n = grid.cells.size();
    std::vector<double> cost(n, std::numeric_limits<double>::infinity());
    std::vector<std::int64_t> parent(n, -1);
    std::vector<char> closed(n, 0);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    auto h = [&](int c, int r) {
      const double dx = std::abs(c - g.col), dy = std::abs(r - g.row);
      return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
    };
    const std::size_t si = grid.index(s.col, s.row), gi = grid.index(g.col, g.row);
    cost[si] = 0.0;
    open.push({h(s.col, s.row), si});
    constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!open.empty()) {
      const std::size_t cur = open.top().second;
      open.pop();
      if (closed[cur]) continue;
      closed[cur] = 1;
      if (cur == gi) break;
      const int c = static_cast<int>(cur % grid.width), r = static_cast<int>(cur / grid.width);
      for (int k = 0; k < 8; ++k) {
        const int nc = c + kDc[k], nr = r + kDr[k];
        if (!passable(nc, nr)) continue;
        if (k >= 4 && (!passable(nc, r) || !passable(c, nr))) continue;
        const std::size_t ni = grid.index(nc, nr);
        const double nd = cost[cur] + (k >= 4 ? std::sqrt(2.0) : 1.0);
        if (nd < cost[ni] - 1e-12) {
          cost[ni] = nd;
          parent[ni] = static_cast<std::int64_t>(cur);
          open.push({nd + h(nc, nr), ni});
        }
      }
    }
    if (!closed[gi]) return std::nullopt;
    std::vector<raster::CellIndex> path;
    for (std::int64_t i = static_cast<std::int64_t>(gi); i >= 0; i = parent[i]) {
      path.push_back({static_cast<int>(i % grid.width), static_cast<int>(i / grid.width)});
    }
    std::reverse(path.begin(), path.end());
    return path;
  }
};

std::vector<LocalPoint> simplify(const std::vector<LocalPoint>& pts) {
  std::vector<LocalPoint> out;
  for (const LocalPoint& p : pts) {
    if (!out.empty() && dist(out.back(), p) < 1e-9) continue;
    while (out.size() >= 2) {
      const LocalPoint a = out[out.size() - 2], b = out.back();
      const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      const double along = (b.x - a.x) * (p.x - b.x) + (b.y - a.y) * (p.y - b.y);
      if (std::abs(cross) > 1e-9 * std::max(1.0, dist(a, p)) || along < 0.0) break;
      out.pop_back();
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

TravelPlanner::TravelPlanner(const GridMap& grid, const MowerProfile& profile) : grid_(grid) {
  profile.validate();
  std::vector<std::uint8_t> nonlawn(grid.cells.size());
  for (std::size_t i = 0; i < grid.cells.size(); ++i) nonlawn[i] = !grid.cells[i].is_free();
  std::vector<std::uint8_t> lawn(nonlawn.size());
  for (std::size_t i = 0; i < lawn.size(); ++i) lawn[i] = !nonlawn[i];
  const auto to_nonlawn = raster::distance_field(grid.width, grid.height, nonlawn);
  const auto to_lawn = raster::distance_field(grid.width, grid.height, lawn);
  auto edge = [&](double cells) { return std::min(cells * grid.resolution - 0.5 * grid.resolution, 1e6); };
  // Signed: positive on lawn, negative outside.
  clearance_.resize(nonlawn.size());
  for (std::size_t i = 0; i < nonlawn.size(); ++i) {
    clearance_[i] = nonlawn[i] ? -edge(to_lawn[i]) : edge(to_nonlawn[i]);
  }
  // Relax the erosion stepwise down to the bare lawn.
  for (double e = std::max(0.5 * profile.mowing_width, profile.boundary_offset); e > grid.resolution; e *= 0.5) {
    levels_.push_back(e);
  }
  levels_.push_back(0.0);
}

std::optional<PathSegment> TravelPlanner::connect(LocalPoint from, LocalPoint to, SegmentMode mode) const {
  if (dist(from, to) < 1e-9) return std::nullopt;
  for (double level : levels_) {
    const Search search{grid_, clearance_, level};
    const auto s = search.snap(from);
    const auto g = search.snap(to);
    if (!s || !g) continue;
    const auto cells = search.astar(*s, *g);
    if (!cells) continue;

    std::vector<LocalPoint> pts{from};
    for (const auto& c : *cells) pts.push_back(grid_.center(c.col, c.row));
    pts.push_back(to);
    // String-pull: from each anchor jump to the farthest visible point.
    std::vector<LocalPoint> pulled{pts.front()};
    std::size_t i = 0;
    while (i + 1 < pts.size()) {
      std::size_t j = i + 1;
      while (j + 1 < pts.size() && search.visible(pts[i], pts[j + 1])) ++j;
      pulled.push_back(pts[j]);
      i = j;
    }
    PathSegment seg{simplify(pulled), mode, 0};
    if (seg.points.size() < 2) return std::nullopt;
    return seg;
  }
  throw PlanningError(ErrorKind::kDisconnectedLawn, "no route across the lawn between two regions");
}

double TravelPlanner::min_clearance(const PathSegment& seg) const {
  const double res = grid_.resolution;
  auto sample = [&](LocalPoint p) {
    double fx = (p.x - grid_.origin.x) / res, fy = (p.y - grid_.origin.y) / res;
    if (fx < 0.0 || fy < 0.0 || fx > grid_.width - 1 || fy > grid_.height - 1) return -1.0;
    const int ix = std::min(static_cast<int>(fx), grid_.width - 2);
    const int iy = std::min(static_cast<int>(fy), grid_.height - 2);
    fx -= ix;
    fy -= iy;
    const std::size_t i = grid_.index(ix, iy);
    const std::size_t up = i + static_cast<std::size_t>(grid_.width);
    return (1 - fy) * ((1 - fx) * clearance_[i] + fx * clearance_[i + 1]) +
           fy * ((1 - fx) * clearance_[up] + fx * clearance_[up + 1]);
  };
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < seg.points.size(); ++k) {
    const LocalPoint a = seg.points[k - 1], b = seg.points[k];
    const int n = std::max(1, static_cast<int>(std::ceil(dist(a, b) / (0.25 * res))));
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      worst = std::min(worst, sample({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)}));
    }
  }
  return worst;
}

std::optional<PathSegment> connect_regions(LocalPoint from, LocalPoint to, const GridMap& grid,
                                           const MowerProfile& profile) {
  return TravelPlanner(grid, profile).connect(from, to);
}

}  // namespace mowplan::pathgen
