#include "mowplan/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

#include "mowplan/error.hpp"

namespace mowplan::decompose {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kSplit: return "split";
    case EventKind::kMerge: return "merge";
    case EventKind::kColumnStart: return "column_start";
    case EventKind::kColumnEnd: return "column_end";
  }
  return "unknown";
}

namespace {

using Runs = std::vector<Interval>;

bool overlaps(const Interval& a, const Interval& b) { return a.start <= b.end && b.start <= a.end; }

bool covers(std::span<const Interval> runs, int row) {
  for (const Interval& r : runs) {
    if (r.start <= row && row <= r.end) return true;
    if (r.start > row) break;
  }
  return false;
}

std::vector<Runs> column_runs(const GridMap& grid) {
  std::vector<Runs> cols(static_cast<std::size_t>(grid.width));
  for (int c = 0; c < grid.width; ++c) cols[c] = raster::free_intervals(grid, c);
  return cols;
}

CellState run_state(std::span<const Interval> runs, int row) {
  return covers(runs, row) ? CellState::lawn() : CellState::non_lawn();
}

// Events between two adjacent columns described by their free runs.
ColumnEvents detect_events(int column, std::span<const Interval> prev, std::span<const Interval> cur) {
  ColumnEvents out{column, {}};
  if (prev.empty() || cur.empty()) return out;

  // children[p] = indices of current runs touching prev run p; parents likewise.
  std::vector<std::vector<int>> children(prev.size());
  std::vector<std::vector<int>> parents(cur.size());
  std::size_t i = 0, j = 0;
  while (i < prev.size() && j < cur.size()) {
    if (overlaps(prev[i], cur[j])) {
      children[i].push_back(static_cast<int>(j));
      parents[j].push_back(static_cast<int>(i));
    }
    if (prev[i].end < cur[j].end) {
      ++i;
    } else {
      ++j;
    }
  }

  auto make = [&](int row, EventKind kind, Interval span) {
    return CriticalEvent{column, row, kind, run_state(prev, row), run_state(cur, row), span};
  };

  for (std::size_t p = 0; p < prev.size(); ++p) {
    const auto& kids = children[p];
    if (kids.size() < 2) continue;
    const Interval span{cur[kids.front()].start, cur[kids.back()].end};
    for (std::size_t k = 0; k + 1 < kids.size(); ++k) {
      out.events.push_back(make(cur[kids[k]].end + 1, EventKind::kSplit, span));
    }
  }
  for (std::size_t c = 0; c < cur.size(); ++c) {
    const auto& pars = parents[c];
    if (pars.size() < 2) continue;
    for (std::size_t k = 0; k + 1 < pars.size(); ++k) {
      out.events.push_back(make(prev[pars[k]].end + 1, EventKind::kMerge, cur[c]));
    }
  }
  if (out.events.empty()) return out;

  std::sort(out.events.begin(), out.events.end(),
            [](const CriticalEvent& a, const CriticalEvent& b) { return a.row < b.row; });
  const int first = cur.front().start;
  const int last = cur.back().end;
  out.events.insert(out.events.begin(), make(first, EventKind::kColumnStart, {first, first}));
  out.events.push_back(make(last, EventKind::kColumnEnd, {last, last}));
  return out;
}

Runs normalize(Runs ranges) {
  std::sort(ranges.begin(), ranges.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  Runs merged;
  for (const Interval& r : ranges) {
    if (!merged.empty() && r.start <= merged.back().end + 1) {
      merged.back().end = std::max(merged.back().end, r.end);
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

// Row ranges of the event column that become separators.
Runs cut_ranges(const ColumnEvents& column) {
  Runs spans;
  for (const CriticalEvent& e : column.events) {
    if (e.kind == EventKind::kSplit || e.kind == EventKind::kMerge) spans.push_back(e.span);
  }
  Runs cuts;
  const auto& ev = column.events;
  for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
    const int lo_row = std::min(ev[k].row, ev[k + 1].row);
    const int hi_row = std::max(ev[k].row, ev[k + 1].row);
    for (const Interval& s : spans) {
      const int lo = std::max(lo_row, s.start);
      const int hi = std::min(hi_row, s.end);
      if (lo <= hi) cuts.push_back({lo, hi});
    }
  }
  return normalize(std::move(cuts));
}

Runs subtract(const Runs& runs, const Runs& cuts) {
  if (cuts.empty()) return runs;
  Runs out;
  for (Interval r : runs) {
    int start = r.start;
    for (const Interval& c : cuts) {
      if (c.end < start || c.start > r.end) continue;
      if (c.start > start) out.push_back({start, c.start - 1});
      start = std::max(start, c.end + 1);
    }
    if (start <= r.end) out.push_back({start, r.end});
  }
  return out;
}

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Runs of the lined grid with a component label per run.
struct LabeledRuns {
  std::vector<Runs> columns;
  std::vector<std::vector<int>> labels;
  int count = 0;
};

LabeledRuns label_runs(std::vector<Runs> columns) {
  LabeledRuns out;
  std::vector<std::size_t> offset(columns.size() + 1, 0);
  for (std::size_t c = 0; c < columns.size(); ++c) offset[c + 1] = offset[c] + columns[c].size();
  DisjointSet sets(offset.back());
  for (std::size_t c = 1; c < columns.size(); ++c) {
    const Runs& a = columns[c - 1];
    const Runs& b = columns[c];
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (overlaps(a[i], b[j])) sets.unite(offset[c - 1] + i, offset[c] + j);
      if (a[i].end < b[j].end) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  std::vector<int> id_of_root(offset.back(), 0);
  out.labels.resize(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.labels[c].resize(columns[c].size());
    for (std::size_t k = 0; k < columns[c].size(); ++k) {
      const std::size_t root = sets.find(offset[c] + k);
      if (id_of_root[root] == 0) id_of_root[root] = ++out.count;
      out.labels[c][k] = id_of_root[root];
    }
  }
  out.columns = std::move(columns);
  return out;
}

std::vector<int> non_monotone(const LabeledRuns& lr) {
  std::set<int> bad;
  std::vector<int> seen_in_column(static_cast<std::size_t>(lr.count) + 1, -1);
  for (std::size_t c = 0; c < lr.labels.size(); ++c) {
    for (int id : lr.labels[c]) {
      if (seen_in_column[id] == static_cast<int>(c)) bad.insert(id);
      seen_in_column[id] = static_cast<int>(c);
    }
  }
  return {bad.begin(), bad.end()};
}

struct Solved {
  std::vector<ColumnEvents> events;  // surviving events, event columns only
  LabeledRuns lined;
  std::vector<int> non_sweepable;
};

Solved solve(const std::vector<Runs>& runs, bool merging) {
  const int width = static_cast<int>(runs.size());
  std::vector<ColumnEvents> raw;
  for (int c = 1; c < width; ++c) {
    ColumnEvents ev = detect_events(c, runs[c - 1], runs[c]);
    if (!ev.empty()) raw.push_back(std::move(ev));
  }

  std::vector<ColumnEvents> active = raw;
  std::vector<bool> restored(raw.size(), !merging);
  if (merging) {
    for (auto& ev : active) ev = merge_events(std::move(ev));
  }

  while (true) {
    std::vector<Runs> cut_columns = runs;
    for (const ColumnEvents& ev : active) {
      cut_columns[ev.column] = subtract(runs[ev.column], cut_ranges(ev));
    }
    LabeledRuns lined = label_runs(std::move(cut_columns));
    std::vector<int> bad = non_monotone(lined);
    if (bad.empty() || !merging) {
      return {std::move(active), std::move(lined), std::move(bad)};
    }

    // Restore the full event list wherever the dropped separator borders a
    // non-sweepable region.
    bool changed = false;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      if (restored[k]) continue;
      const int col = raw[k].column;
      const Runs dropped = subtract(cut_ranges(raw[k]), cut_ranges(active[k]));
      const Runs& col_runs = lined.columns[col];
      bool touches = false;
      for (std::size_t r = 0; r < col_runs.size() && !touches; ++r) {
        if (!std::binary_search(bad.begin(), bad.end(), lined.labels[col][r])) continue;
        for (const Interval& d : dropped) {
          if (overlaps(d, col_runs[r])) {
            touches = true;
            break;
          }
        }
      }
      if (touches) {
        active[k] = raw[k];
        restored[k] = true;
        changed = true;
      }
    }
    if (!changed) return {std::move(active), std::move(lined), std::move(bad)};
  }
}

GridMap runs_to_labels(const GridMap& like, const LabeledRuns& lr) {
  GridMap out(like.width, like.height, like.resolution, like.origin);
  for (std::size_t c = 0; c < lr.columns.size(); ++c) {
    for (std::size_t k = 0; k < lr.columns[c].size(); ++k) {
      for (int row = lr.columns[c][k].start; row <= lr.columns[c][k].end; ++row) {
        out.at(static_cast<int>(c), row) = CellState::region(lr.labels[c][k]);
      }
    }
  }
  return out;
}

// Gives every free cell of `free_mask` without a label the label of its right
// neighbour, then its left neighbour, then the nearest labeled cell.
void backfill(GridMap& labels, const GridMap& free_mask) {
  auto pending = [&](int c, int r) {
    return free_mask.at(c, r).is_free() && !labels.at(c, r).is_region();
  };
  for (int c = labels.width - 2; c >= 0; --c) {
    for (int r = 0; r < labels.height; ++r) {
      if (pending(c, r) && labels.at(c + 1, r).is_region()) labels.at(c, r) = labels.at(c + 1, r);
    }
  }
  for (int c = 1; c < labels.width; ++c) {
    for (int r = 0; r < labels.height; ++r) {
      if (pending(c, r) && labels.at(c - 1, r).is_region()) labels.at(c, r) = labels.at(c - 1, r);
    }
  }
  std::deque<raster::CellIndex> queue;
  for (int c = 0; c < labels.width; ++c) {
    for (int r = 0; r < labels.height; ++r) {
      if (labels.at(c, r).is_region()) queue.push_back({c, r});
    }
  }
  while (!queue.empty()) {
    const raster::CellIndex cur = queue.front();
    queue.pop_front();
    constexpr int kDc[4] = {1, -1, 0, 0};
    constexpr int kDr[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nc = cur.col + kDc[k];
      const int nr = cur.row + kDr[k];
      if (labels.contains(nc, nr) && pending(nc, nr)) {
        labels.at(nc, nr) = labels.at(cur.col, cur.row);
        queue.push_back({nc, nr});
      }
    }
  }
}

// Nearest-neighbour rotation of an already stair-stepped boundary leaves
// one-cell teeth, pits and diagonal-only pixels; each would register as a
// separate column interval. Fill cells with >= 3 lawn 4-neighbours and drop
// lawn cells with <= 1 until stable.
void despeckle(GridMap& grid) {
  auto lawn_neighbours = [&](int c, int r) {
    int n = 0;
    n += c + 1 < grid.width && grid.at(c + 1, r).is_free();
    n += c > 0 && grid.at(c - 1, r).is_free();
    n += r + 1 < grid.height && grid.at(c, r + 1).is_free();
    n += r > 0 && grid.at(c, r - 1).is_free();
    return n;
  };
  std::vector<raster::CellIndex> flips;
  for (int pass = 0; pass < 8; ++pass) {
    bool changed = false;
    for (int phase = 0; phase < 2; ++phase) {
      flips.clear();
      for (int c = 0; c < grid.width; ++c) {
        for (int r = 0; r < grid.height; ++r) {
          const bool free = grid.at(c, r).is_free();
          const int n = lawn_neighbours(c, r);
          if (phase == 0 && !free && n >= 3) flips.push_back({c, r});
          if (phase == 1 && free && n <= 1) flips.push_back({c, r});
        }
      }
      for (const auto& f : flips) {
        grid.at(f.col, f.row) = phase == 0 ? CellState::lawn() : CellState::non_lawn();
      }
      changed = changed || !flips.empty();
    }
    if (!changed) break;
  }
}

void check_theta(double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0)) {
    throw PlanningError(ErrorKind::kInvalidInput, "sweep angle must lie in [0, 180] degrees");
  }
}

}  // namespace

ColumnEvents critical_points(int column, const GridMap& grid) {
  if (column < 1 || column >= grid.width) {
    throw PlanningError(ErrorKind::kInvalidInput, "critical_points column out of range");
  }
  const Runs prev = raster::free_intervals(grid, column - 1);
  const Runs cur = raster::free_intervals(grid, column);
  ColumnEvents events = detect_events(column, prev, cur);
  for (CriticalEvent& e : events.events) {
    e.prev_state = grid.at(column - 1, e.row);
    e.state = grid.at(column, e.row);
  }
  return events;
}

ColumnEvents merge_events(ColumnEvents events) {
  if (!events.events.empty()) events.events.erase(events.events.begin());
  return events;
}

GridMap apply_lines(std::span<const ColumnEvents> all_events, const GridMap& grid) {
  GridMap out = grid;
  for (const ColumnEvents& ev : all_events) {
    if (ev.column < 0 || ev.column >= grid.width) continue;
    for (const Interval& cut : cut_ranges(ev)) {
      for (int row = std::max(0, cut.start); row <= std::min(grid.height - 1, cut.end); ++row) {
        if (out.at(ev.column, row).is_free()) out.at(ev.column, row) = CellState::non_lawn();
      }
    }
  }
  return out;
}

Decomposition draw_lines(std::span<const ColumnEvents> all_events, const GridMap& grid) {
  const GridMap lined = apply_lines(all_events, grid);
  Decomposition d;
  d.regions = raster::label_components(lined);
  for (const CellState s : d.regions.cells) d.region_count = std::max(d.region_count, s.region_id());
  backfill(d.regions, grid);
  d.events_used.assign(all_events.begin(), all_events.end());
  d.non_sweepable = non_monotone_regions(d.regions);
  return d;
}

std::vector<int> non_monotone_regions(const GridMap& labels) {
  std::set<int> bad;
  for (int c = 0; c < labels.width; ++c) {
    std::set<int> seen;
    int prev = 0;
    for (int r = 0; r < labels.height; ++r) {
      const int id = labels.at(c, r).region_id();
      if (id != 0 && id != prev && !seen.insert(id).second) bad.insert(id);
      prev = id;
    }
  }
  return {bad.begin(), bad.end()};
}

namespace {

// Where rotated lawn images come from: the polygon when one is available,
// otherwise a resampled copy of the raster.
struct Source {
  const GridMap& grid;
  const geo::LocalPolygon* polygon = nullptr;

  raster::RotatedView view(double theta_deg) const {
    if (polygon != nullptr) {
      return raster::rasterize_rotated(*polygon, grid.resolution, theta_deg, raster::grid_center(grid));
    }
    raster::RotatedView v = raster::rotate_grid(grid, theta_deg);
    despeckle(v.grid());
    return v;
  }

  std::vector<Runs> runs(double theta_deg) const {
    if (polygon != nullptr) {
      return raster::rotated_column_runs(*polygon, grid.resolution, theta_deg, raster::grid_center(grid));
    }
    return column_runs(view(theta_deg).grid());
  }
};

RotatedDecomposition rotated(double theta_deg, const Source& src, bool merging) {
  check_theta(theta_deg);
  raster::RotatedView view = src.view(theta_deg);
  Solved solved = solve(column_runs(view.grid()), merging);

  GridMap lined = runs_to_labels(view.grid(), solved.lined);
  GridMap labels = lined;
  for (CellState& s : lined.cells) {
    if (s.is_region()) s = CellState::lawn();
  }
  backfill(labels, view.grid());

  RotatedDecomposition out{std::move(view), std::move(solved.events), std::move(lined),
                           std::move(labels), solved.lined.count, std::move(solved.non_sweepable)};
  return out;
}

struct Score {
  int regions = 0;
  int columns = 0;  // rotated columns meeting the lawn
};

Score score(double theta_deg, const Source& src, bool merging) {
  check_theta(theta_deg);
  const std::vector<Runs> runs = src.runs(theta_deg);
  const int columns = static_cast<int>(
      std::count_if(runs.begin(), runs.end(), [](const Runs& r) { return !r.empty(); }));
  return {solve(runs, merging).lined.count, columns};
}

Decomposition transfer(RotatedDecomposition rot, const GridMap& grid);

Decomposition merge_at(double theta_deg, const Source& src, bool merging) {
  Decomposition d = transfer(rotated(theta_deg, src, merging), src.grid);
  d.theta = theta_deg;
  return d;
}

SweepResult sweep(const Source& src, bool merging, double angle_step) {
  if (!(angle_step > 0.0) || angle_step > 180.0) {
    throw PlanningError(ErrorKind::kInvalidInput, "angle step must lie in (0, 180]");
  }
  const double steps_real = 180.0 / angle_step;
  const long steps = std::lround(steps_real);
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9) {
    throw PlanningError(ErrorKind::kInvalidInput, "angle step must divide 180");
  }

  SweepResult result;
  double best_theta = 0.0;
  Score best{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  for (long k = 0; k <= steps; ++k) {
    const double theta = std::min(180.0, static_cast<double>(k) * angle_step);
    const Score sc = score(theta, src, merging);
    result.all[theta] = sc.regions;
    result.columns[theta] = sc.columns;
    // Equal region counts: prefer the sweep with fewer lawn columns, which
    // means fewer tracks and turns, then the smaller angle.
    if (sc.regions < best.regions || (sc.regions == best.regions && sc.columns < best.columns)) {
      best = sc;
      best_theta = theta;
    }
  }
  result.best = merge_at(best_theta, src, merging);
  // A region lost in the back-transfer can only lower the count.
  result.all[best_theta] = result.best.region_count;
  return result;
}

}  // namespace

RotatedDecomposition decompose_rotated(double theta_deg, const GridMap& grid, bool merging) {
  return rotated(theta_deg, Source{grid}, merging);
}

RotatedDecomposition decompose_rotated(double theta_deg, const geo::LocalPolygon& lawn, const GridMap& grid,
                                       bool merging) {
  return rotated(theta_deg, Source{grid, &lawn}, merging);
}

int count_regions(double theta_deg, const GridMap& grid, bool merging) {
  return score(theta_deg, Source{grid}, merging).regions;
}

int count_regions(double theta_deg, const geo::LocalPolygon& lawn, const GridMap& grid, bool merging) {
  return score(theta_deg, Source{grid, &lawn}, merging).regions;
}

Decomposition decompose_merge(double theta_deg, const GridMap& grid, bool merging) {
  return merge_at(theta_deg, Source{grid}, merging);
}

Decomposition decompose_merge(double theta_deg, const geo::LocalPolygon& lawn, const GridMap& grid,
                              bool merging) {
  return merge_at(theta_deg, Source{grid, &lawn}, merging);
}

SweepResult adaptive_decomposition(const GridMap& grid, bool merging, double angle_step) {
  return sweep(Source{grid}, merging, angle_step);
}

SweepResult adaptive_decomposition(const geo::LocalPolygon& lawn, const GridMap& grid, bool merging,
                                   double angle_step) {
  return sweep(Source{grid, &lawn}, merging, angle_step);
}

namespace {

Decomposition transfer(RotatedDecomposition rot, const GridMap& grid) {
  const raster::RotatedView& view = rot.view;
  const GridMap& rlabels = rot.labels;

  Decomposition d;
  d.regions = GridMap(grid.width, grid.height, grid.resolution, grid.origin);
  d.events_used = std::move(rot.events);

  // Pull each source cell's label from the nearest labeled rotated cell.
  std::vector<raster::CellIndex> unresolved;
  for (int c = 0; c < grid.width; ++c) {
    for (int r = 0; r < grid.height; ++r) {
      if (!grid.at(c, r).is_free()) continue;
      const auto [fc, fr] = view.to_rotated(grid.center(c, r));
      int best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      const int rc = static_cast<int>(std::lround(fc));
      const int rr = static_cast<int>(std::lround(fr));
      for (int radius = 0; radius <= 2 && best == 0; ++radius) {
        for (int dc = -radius; dc <= radius; ++dc) {
          for (int dr = -radius; dr <= radius; ++dr) {
            if (std::max(std::abs(dc), std::abs(dr)) != radius) continue;
            const int nc = rc + dc;
            const int nr = rr + dr;
            if (!rlabels.contains(nc, nr) || !rlabels.at(nc, nr).is_region()) continue;
            const double d2 = (nc - fc) * (nc - fc) + (nr - fr) * (nr - fr);
            if (d2 < best_d2) {
              best_d2 = d2;
              best = rlabels.at(nc, nr).region_id();
            }
          }
        }
      }
      if (best != 0) {
        d.regions.at(c, r) = CellState::region(best);
      } else {
        d.regions.at(c, r) = CellState::lawn();
        unresolved.push_back({c, r});
      }
    }
  }

  // Regions too thin to be hit by any source cell center claim the source
  // cells their own cells were sampled from.
  std::vector<char> present(static_cast<std::size_t>(rot.region_count) + 1, 0);
  for (const CellState s : d.regions.cells) present[s.region_id()] = 1;
  for (int c = 0; c < rlabels.width; ++c) {
    for (int r = 0; r < rlabels.height; ++r) {
      const int id = rlabels.at(c, r).region_id();
      if (id == 0 || present[id]) continue;
      const auto src = grid.cell_of(view.to_original(c, r));
      if (src && grid.at(src->col, src->row).is_free()) d.regions.at(src->col, src->row) = CellState::region(id);
    }
  }

  if (!unresolved.empty()) backfill(d.regions, grid);

  // Compact ids in case a region vanished in the transfer.
  std::vector<int> remap(static_cast<std::size_t>(rot.region_count) + 1, 0);
  for (const CellState s : d.regions.cells) present[s.region_id()] = 0;
  for (const CellState s : d.regions.cells) {
    if (s.is_region()) present[s.region_id()] = 1;
  }
  int next = 0;
  for (int id = 1; id <= rot.region_count; ++id) {
    if (present[id]) remap[id] = ++next;
  }
  if (next != rot.region_count) {
    for (CellState& s : d.regions.cells) {
      if (s.is_region()) s = CellState::region(remap[s.region_id()]);
    }
  }
  d.region_count = next;
  for (int id : rot.non_sweepable) {
    if (remap[id] != 0) d.non_sweepable.push_back(remap[id]);
  }
  return d;
}

}  // namespace

}  // namespace mowplan::decompose
