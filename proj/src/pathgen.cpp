#include "mowplan/pathgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/geometry.hpp>

#include "mowplan/error.hpp"

namespace mowplan::pathgen {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kArcStep = 5.0 * kPi / 180.0;
constexpr double kEps = 1e-9;

LocalPoint operator+(LocalPoint a, LocalPoint b) { return {a.x + b.x, a.y + b.y}; }
LocalPoint operator-(LocalPoint a, LocalPoint b) { return {a.x - b.x, a.y - b.y}; }
LocalPoint operator*(double s, LocalPoint a) { return {s * a.x, s * a.y}; }
double dot(LocalPoint a, LocalPoint b) { return a.x * b.x + a.y * b.y; }
double dist(LocalPoint a, LocalPoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

void push_distinct(std::vector<LocalPoint>& pts, LocalPoint p) {
  if (pts.empty() || dist(pts.back(), p) > kEps) pts.push_back(p);
}

// Appends an arc about `center` starting at angle `start` (the previous point)
// and sweeping `sweep` radians, positive counterclockwise.
void append_arc(std::vector<LocalPoint>& pts, LocalPoint center, double r, double start, double sweep) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / kArcStep - 1e-9)));
  for (int i = 1; i <= n; ++i) {
    const double a = start + sweep * i / n;
    push_distinct(pts, {center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
}

double wrap_2pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

// Turn in a canonical frame: start at the origin heading +y, finish at
// (d, e) heading -y, with d > 0.
std::vector<LocalPoint> canonical_turn(double d, double e, double r, TurnType type) {
  std::vector<LocalPoint> pts{{0.0, 0.0}};
  if (r <= 0.0) {
    pts.push_back({d, e});
    return pts;
  }
  const bool wide = d >= 2.0 * r - kEps;
  if (type == TurnType::kUTurn && wide) {
    const LocalPoint c1{r, 0.0};
    const LocalPoint c2{d - r, e};
    LocalPoint g = c2 - c1;
    g.x = std::max(g.x, 0.0);
    const double len = std::hypot(g.x, g.y);
    const LocalPoint nl = len < 1e-12 ? LocalPoint{0.0, 1.0} : LocalPoint{-g.y / len, g.x / len};
    const double phi = std::atan2(nl.y, nl.x);
    append_arc(pts, c1, r, kPi, -(kPi - phi));
    push_distinct(pts, c2 + r * nl);
    append_arc(pts, c2, r, phi, -phi);
  } else if (type == TurnType::kUTurn) {
    // Bulb: out, around, back in.
    const double alpha = std::acos(std::clamp((d + 2.0 * r) / (4.0 * r), -1.0, 1.0));
    const double h = std::sqrt(std::max(0.0, 4.0 * r * r - (0.5 * d + r) * (0.5 * d + r)));
    append_arc(pts, {-r, 0.0}, r, 0.0, alpha);
    append_arc(pts, {0.5 * d, h}, r, kPi + alpha, -(kPi + 2.0 * alpha));
    append_arc(pts, {d + r, 0.0}, r, kPi - alpha, alpha);
  } else if (!wide) {
    // Forward toward the next track, straight reverse, forward again.
    append_arc(pts, {r, 0.0}, r, kPi, -0.5 * kPi);
    push_distinct(pts, {d - r, r});
    append_arc(pts, {d - r, 0.0}, r, 0.5 * kPi, -0.5 * kPi);
  } else {
    // Forward away from the next track, reverse across, forward again.
    const LocalPoint c1{-r, 0.0};
    const LocalPoint c2{d + r, e};
    const LocalPoint m = c2 - c1;
    const double phi = wrap_2pi(std::atan2(-m.y, -m.x) - 0.5 * kPi);
    append_arc(pts, c1, r, 0.0, phi);
    push_distinct(pts, c2 + r * LocalPoint{std::cos(phi), std::sin(phi)});
    append_arc(pts, c2, r, phi, kPi - phi);
  }
  if (std::abs(pts.back().y - e) > kEps) push_distinct(pts, {d, e});
  return pts;
}

}  // namespace

const char* to_string(TurnType t) { return t == TurnType::kUTurn ? "uturn" : "threepoint"; }

const char* to_string(SegmentMode m) {
  switch (m) {
    case SegmentMode::kMow: return "mow";
    case SegmentMode::kTurn: return "turn";
    case SegmentMode::kTravel: return "travel";
    case SegmentMode::kBorder: return "border";
  }
  return "unknown";
}

std::optional<TurnType> parse_turn_type(const std::string& s) {
  if (s == "uturn") return TurnType::kUTurn;
  if (s == "threepoint") return TurnType::kThreePoint;
  return std::nullopt;
}

std::optional<SegmentMode> parse_segment_mode(const std::string& s) {
  for (SegmentMode m : {SegmentMode::kMow, SegmentMode::kTurn, SegmentMode::kTravel, SegmentMode::kBorder}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

void MowerProfile::validate() const {
  auto bad = [](const char* msg) { throw PlanningError(ErrorKind::kInvalidInput, msg); };
  if (!(mowing_width > 0.0) || !std::isfinite(mowing_width)) bad("mowing width must be positive");
  if (!(overlap >= 0.0) || !(overlap < mowing_width)) bad("overlap must lie in [0, mowing width)");
  if (!(boundary_offset >= 0.0) || !std::isfinite(boundary_offset)) bad("boundary offset must be >= 0");
  if (!(turn_radius >= 0.0) || !std::isfinite(turn_radius)) bad("turn radius must be >= 0");
}

double PathSegment::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += dist(points[i - 1], points[i]);
  return total;
}

LocalPoint track_direction(double theta_deg) {
  const double t = theta_deg * kPi / 180.0;
  return {std::cos(t), std::sin(t)};
}

LocalPoint cross_direction(double theta_deg) {
  const double t = theta_deg * kPi / 180.0;
  return {std::sin(t), -std::cos(t)};
}

double turn_depth(double spacing, double radius) {
  if (radius <= 0.0) return 0.0;
  if (spacing >= 2.0 * radius - kEps) return radius;
  const double alpha = std::acos(std::clamp((spacing + 2.0 * radius) / (4.0 * radius), -1.0, 1.0));
  return radius * (1.0 + 2.0 * std::sin(alpha));
}

PathSegment synthesize_turn(const Pose& end_a, const Pose& start_b, const MowerProfile& profile) {
  const LocalPoint fwd{std::cos(end_a.heading), std::sin(end_a.heading)};
  const LocalPoint right{fwd.y, -fwd.x};
  if (std::cos(end_a.heading - start_b.heading) > -1.0 + 1e-6) {
    throw PlanningError(ErrorKind::kInvalidInput, "turn endpoints must have opposite headings");
  }
  const LocalPoint delta = start_b.p - end_a.p;
  const double lateral = dot(delta, right);
  const double side = lateral < 0.0 ? -1.0 : 1.0;
  const double d = std::abs(lateral);
  if (d < kEps) throw PlanningError(ErrorKind::kInvalidInput, "turn endpoints lie on the same track");

  const auto local = canonical_turn(d, dot(delta, fwd), profile.turn_radius, profile.turn_type);
  PathSegment seg;
  seg.mode = SegmentMode::kTurn;
  for (const LocalPoint& q : local) push_distinct(seg.points, end_a.p + (side * q.x) * right + q.y * fwd);
  seg.points.front() = end_a.p;
  if (seg.points.size() < 2) seg.points.push_back(start_b.p);
  seg.points.back() = start_b.p;
  return seg;
}

namespace {

// Signed clearance over a window of the grid, sampled bilinearly between
// cell centers.
class ClearanceField {
 public:
  ClearanceField(const GridMap& regions, int region_id, double offset, int margin) : res_(regions.resolution) {
    int cmin = regions.width, cmax = -1, rmin = regions.height, rmax = -1;
    for (int r = 0; r < regions.height; ++r) {
      for (int c = 0; c < regions.width; ++c) {
        if (regions.at(c, r).region_id() != region_id) continue;
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
    }
    if (cmax < 0) return;
    c0_ = std::max(0, cmin - margin);
    r0_ = std::max(0, rmin - margin);
    w_ = std::min(regions.width - 1, cmax + margin) - c0_ + 1;
    h_ = std::min(regions.height - 1, rmax + margin) - r0_ + 1;
    origin_ = regions.center(c0_, r0_);

    const std::size_t n = static_cast<std::size_t>(w_) * static_cast<std::size_t>(h_);
    std::vector<std::uint8_t> in(n), out(n), lawn(n), nonlawn(n);
    for (int r = 0; r < h_; ++r) {
      for (int c = 0; c < w_; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w_ + c;
        const raster::CellState s = regions.at(c0_ + c, r0_ + r);
        in[i] = s.region_id() == region_id;
        out[i] = !in[i];
        lawn[i] = s.is_free();
        nonlawn[i] = !lawn[i];
      }
    }
    const auto to_out = raster::distance_field(w_, h_, out);
    const auto to_in = raster::distance_field(w_, h_, in);
    const auto to_nonlawn = raster::distance_field(w_, h_, nonlawn);
    const auto to_lawn = raster::distance_field(w_, h_, lawn);
    auto edge = [&](double cells) { return std::min(cells * res_ - 0.5 * res_, 1e6); };
    values_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s_region = in[i] ? edge(to_out[i]) : -edge(to_in[i]);
      const double s_lawn = lawn[i] ? edge(to_nonlawn[i]) : -edge(to_lawn[i]);
      values_[i] = std::min(s_region, s_lawn - offset);
      if (in[i]) cells_.push_back(regions.center(c0_ + static_cast<int>(i % w_), r0_ + static_cast<int>(i / w_)));
    }
  }

  bool empty() const { return cells_.empty(); }
  const std::vector<LocalPoint>& cells() const { return cells_; }

  double sample(LocalPoint p) const {
    double fx = (p.x - origin_.x) / res_;
    double fy = (p.y - origin_.y) / res_;
    if (fx < 0.0 || fy < 0.0 || fx > w_ - 1 || fy > h_ - 1) return -1e6;
    const int ix = std::min(static_cast<int>(fx), w_ - 2);
    const int iy = std::min(static_cast<int>(fy), h_ - 2);
    fx -= ix;
    fy -= iy;
    const std::size_t i = static_cast<std::size_t>(iy) * w_ + ix;
    const double a = values_[i], b = values_[i + 1], c = values_[i + w_], d = values_[i + w_ + 1];
    return (1 - fy) * ((1 - fx) * a + fx * b) + fy * ((1 - fx) * c + fx * d);
  }

 private:
  double res_;
  int c0_ = 0, r0_ = 0, w_ = 0, h_ = 0;
  LocalPoint origin_;
  std::vector<double> values_;
  std::vector<LocalPoint> cells_;
};

struct Run {
  double v0 = 0.0;
  double v1 = 0.0;
};

struct Scanner {
  const ClearanceField& field;
  LocalPoint t, n;
  double v_min, v_max, step;

  LocalPoint at(double u, double v) const { return u * n + v * t; }
  bool ok(double u, double v, double tau) const { return field.sample(at(u, v)) >= tau; }

  // Every stretch along the line at `u` where the clearance reaches tau;
  // ends are bisected when `precise`.
  std::vector<Run> runs(double u, double tau, bool precise) const {
    std::vector<Run> out;
    const int n_samples = static_cast<int>(std::ceil((v_max - v_min) / step)) + 1;
    int start = -1;
    for (int j = 0; j <= n_samples; ++j) {
      const bool valid = j < n_samples && ok(u, v_min + j * step, tau);
      if (valid && start < 0) start = j;
      if (!valid && start >= 0) {
        Run run{v_min + start * step, v_min + (j - 1) * step};
        if (precise) {
          run.v0 = refine(u, tau, run.v0, run.v0 - step);
          run.v1 = refine(u, tau, run.v1, run.v1 + step);
        }
        out.push_back(run);
        start = -1;
      }
    }
    return out;
  }

  std::optional<Run> longest(double u, double tau) const {
    std::optional<Run> best;
    for (const Run& r : runs(u, tau, false)) {
      if (!best || r.v1 - r.v0 > best->v1 - best->v0) best = r;
    }
    if (best) {
      best->v0 = refine(u, tau, best->v0, best->v0 - step);
      best->v1 = refine(u, tau, best->v1, best->v1 + step);
    }
    return best;
  }

  // Bisects between a valid and an invalid position on the line.
  double refine(double u, double tau, double good, double bad) const {
    for (int k = 0; k < 14; ++k) {
      const double mid = 0.5 * (good + bad);
      (ok(u, mid, tau) ? good : bad) = mid;
    }
    return good;
  }

  double max_on_line(double u) const {
    double best = -1e9;
    for (double v = v_min; v <= v_max; v += step) best = std::max(best, field.sample(at(u, v)));
    return best;
  }
};

}  // namespace

namespace {

bool overlaps(const Run& a, const Run& b) { return a.v0 <= b.v1 + kEps && b.v0 <= a.v1 + kEps; }

double overlap_len(const Run& a, const Run& b) { return std::min(a.v1, b.v1) - std::max(a.v0, b.v0); }

// A stretch of the eroded region that every line crosses at most once.
struct Piece {
  double du = 0.0;
  std::vector<std::pair<double, Run>> samples;  // ascending u

  const Run& near(double u) const {
    const double k = std::round((u - samples.front().first) / du);
    const auto i = static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(samples.size() - 1)));
    return samples[i].second;
  }
};

// Sweeps lines across the region and starts a new piece wherever a run
// splits, merges, appears or vanishes.
std::vector<Piece> trace_pieces(const Scanner& scan, double u0, double u1, double du, double tau) {
  std::vector<Piece> pieces;
  std::vector<Run> prev;
  std::vector<std::size_t> prev_id;
  const int lines = static_cast<int>(std::ceil((u1 - u0) / du));
  for (int k = 0; k <= lines; ++k) {
    const double u = u0 + k * du;
    const std::vector<Run> cur = scan.runs(u, tau, false);
    std::vector<int> prev_hits(prev.size(), 0), cur_hits(cur.size(), 0);
    std::vector<std::size_t> link(cur.size(), 0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::size_t j = 0; j < prev.size(); ++j) {
        if (!overlaps(cur[i], prev[j])) continue;
        ++cur_hits[i];
        ++prev_hits[j];
        link[i] = j;
      }
    }
    std::vector<std::size_t> cur_id(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (cur_hits[i] == 1 && prev_hits[link[i]] == 1) {
        cur_id[i] = prev_id[link[i]];
      } else {
        cur_id[i] = pieces.size();
        pieces.push_back(Piece{du, {}});
      }
      pieces[cur_id[i]].samples.push_back({u, cur[i]});
    }
    prev = cur;
    prev_id = std::move(cur_id);
  }
  return pieces;
}

// Tracks of each piece of a region. Each piece gets its own lattice from its
// low edge, plus a final track clamped to its high edge.
std::vector<std::vector<Track>> region_pieces(const GridMap& regions, int region_id, double theta_deg,
                                              const MowerProfile& profile) {
  profile.validate();
  const double res = regions.resolution;
  const double half = 0.5 * profile.mowing_width;
  const int margin = static_cast<int>(std::ceil((profile.boundary_offset + half) / res)) + 3;
  const ClearanceField field(regions, region_id, profile.boundary_offset, margin);
  if (field.empty()) return {};

  const LocalPoint t = track_direction(theta_deg);
  const LocalPoint n = cross_direction(theta_deg);
  double u_min = std::numeric_limits<double>::infinity(), u_max = -u_min;
  double v_min = u_min, v_max = -u_min;
  for (const LocalPoint& p : field.cells()) {
    u_min = std::min(u_min, dot(p, n));
    u_max = std::max(u_max, dot(p, n));
    v_min = std::min(v_min, dot(p, t));
    v_max = std::max(v_max, dot(p, t));
  }
  const Scanner scan{field, t, n, v_min - res, v_max + res, 0.25 * res};
  const double tau = half - 1e-6;
  const double du = 0.5 * res;
  const std::vector<Piece> pieces = trace_pieces(scan, u_min - res, u_max + res, du, tau);

  std::vector<std::vector<Track>> out;
  if (pieces.empty()) {
    // Narrower than the mowing width: one track along the widest line.
    double best_u = 0.0, best_c = -1e9;
    for (double u = u_min; u <= u_max + 1e-12; u += scan.step) {
      const double c = scan.max_on_line(u);
      if (c > best_c) {
        best_c = c;
        best_u = u;
      }
    }
    if (best_c <= 1e-9) return {};
    if (auto run = scan.longest(best_u, 0.5 * best_c); run && run->v1 - run->v0 > 1e-6) {
      out.push_back({{best_u, run->v0, run->v1}});
    }
    return out;
  }

  const double spacing = profile.spacing();
  std::size_t total = 0;
  for (const Piece& piece : pieces) {
    // Bisect the piece's edges between sampled lines; past a split the line
    // meets the piece's last run in two places.
    auto present = [&](double u, const Run& ref) {
      int hits = 0;
      for (const Run& r : scan.runs(u, tau, false)) hits += overlaps(r, ref);
      return hits == 1;
    };
    auto edge = [&](double good, double bad, const Run& ref) {
      for (int k = 0; k < 14; ++k) {
        const double mid = 0.5 * (good + bad);
        (present(mid, ref) ? good : bad) = mid;
      }
      return good;
    };
    const double lo = edge(piece.samples.front().first, piece.samples.front().first - du, piece.samples.front().second);
    const double hi = edge(piece.samples.back().first, piece.samples.back().first + du, piece.samples.back().second);

    const double band = hi - lo;
    std::vector<double> offsets;
    if (band < 0.5 * res) {
      offsets.push_back(0.5 * (lo + hi));
    } else {
      const int regular = static_cast<int>(std::floor(band / spacing + 1e-9));
      for (int k = 0; k <= regular; ++k) offsets.push_back(lo + k * spacing);
      if (band - regular * spacing > 0.5 * res) offsets.push_back(hi);
    }
    std::vector<Track> tracks;
    for (double u : offsets) {
      const Run& ref = piece.near(u);
      std::optional<Run> pick;
      for (const Run& r : scan.runs(u, tau, true)) {
        if (overlaps(r, ref) && (!pick || overlap_len(r, ref) > overlap_len(*pick, ref))) pick = r;
      }
      if (pick && pick->v1 - pick->v0 > 1e-6) tracks.push_back({u, pick->v0, pick->v1});
    }
    if (!tracks.empty()) {
      total += tracks.size();
      out.push_back(std::move(tracks));
    }
  }

  const double extent = u_max - u_min + res;
  if (total >= 2 && profile.turn_radius > 0.5 * extent) {
    throw PlanningError(ErrorKind::kTurnInfeasible,
                        "turn radius exceeds half the width of region " + std::to_string(region_id));
  }
  return out;
}

}  // namespace

std::vector<Track> region_tracks(const GridMap& regions, int region_id, double theta_deg,
                                 const MowerProfile& profile) {
  std::vector<Track> tracks;
  for (auto& piece : region_pieces(regions, region_id, theta_deg, profile)) {
    tracks.insert(tracks.end(), piece.begin(), piece.end());
  }
  std::stable_sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) { return a.u < b.u; });
  return tracks;
}

RegionPass serpentine(std::vector<Track> tracks, int region_id, double theta_deg, const MowerProfile& profile,
                      bool from_high_u, bool first_forward) {
  std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) { return a.u < b.u; });
  if (from_high_u) std::reverse(tracks.begin(), tracks.end());
  const double r = profile.turn_radius;
  const double half = 0.5 * profile.mowing_width;

  std::vector<Track> work;
  while (true) {
    work = tracks;
    for (std::size_t k = 0; k + 1 < work.size(); ++k) {
      const bool forward = first_forward == (k % 2 == 0);
      const double d = std::abs(work[k + 1].u - work[k].u);
      const bool narrow = r > 0.0 && d < 2.0 * r - kEps;
      const double retract = std::max(0.0, turn_depth(d, r) - half);
      if (forward) {
        if (narrow) work[k].v1 = work[k + 1].v1 = std::min(work[k].v1, work[k + 1].v1);
        work[k].v1 -= retract;
        work[k + 1].v1 -= retract;
      } else {
        if (narrow) work[k].v0 = work[k + 1].v0 = std::max(work[k].v0, work[k + 1].v0);
        work[k].v0 += retract;
        work[k + 1].v0 += retract;
      }
    }
    const auto degenerate =
        std::find_if(work.begin(), work.end(), [](const Track& tr) { return tr.v1 - tr.v0 < 1e-6; });
    if (degenerate == work.end()) break;
    tracks.erase(tracks.begin() + (degenerate - work.begin()));
  }

  const LocalPoint t = track_direction(theta_deg);
  const LocalPoint n = cross_direction(theta_deg);
  const double heading = theta_deg * kPi / 180.0;
  RegionPass pass;
  pass.region = region_id;
  for (std::size_t k = 0; k < work.size(); ++k) {
    const bool forward = first_forward == (k % 2 == 0);
    const Track& tr = work[k];
    const LocalPoint a = tr.u * n + (forward ? tr.v0 : tr.v1) * t;
    const LocalPoint b = tr.u * n + (forward ? tr.v1 : tr.v0) * t;
    if (k > 0) {
      const Pose from{pass.segments.back().back(), forward ? heading + kPi : heading};
      PathSegment turn = synthesize_turn(from, Pose{a, forward ? heading : heading + kPi}, profile);
      turn.region = region_id;
      pass.segments.push_back(std::move(turn));
    }
    pass.segments.push_back(PathSegment{{a, b}, SegmentMode::kMow, region_id});
  }
  if (!pass.segments.empty()) {
    pass.entry = pass.segments.front().front();
    pass.exit = pass.segments.back().back();
  }
  return pass;
}

namespace {

// Serpentines of a region's pieces chained into one pass. The variant picks
// the piece holding the lowest (or highest) track and its first direction;
// later pieces follow greedily by nearest entry. Moves between pieces follow
// the lawn when `travel` is given and are tagged Turn.
RegionPass region_pass(const std::vector<std::vector<Track>>& pieces, int region_id, double theta_deg,
                       const MowerProfile& profile, bool from_high_u, bool first_forward,
                       const TravelPlanner* travel) {
  if (pieces.size() == 1) return serpentine(pieces[0], region_id, theta_deg, profile, from_high_u, first_forward);
  RegionPass out;
  out.region = region_id;
  if (pieces.empty()) return out;

  std::size_t first = 0;
  auto extreme = [&](const std::vector<Track>& p) {
    double e = p.front().u;
    for (const Track& tr : p) e = from_high_u ? std::max(e, tr.u) : std::min(e, tr.u);
    return e;
  };
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (from_high_u ? extreme(pieces[i]) > extreme(pieces[first]) : extreme(pieces[i]) < extreme(pieces[first])) {
      first = i;
    }
  }
  std::vector<bool> done(pieces.size(), false);
  int next_piece = 0;
  auto append = [&](RegionPass pass) {
    if (pass.segments.empty()) return;
    for (PathSegment& seg : pass.segments) seg.piece = next_piece;
    ++next_piece;
    if (!out.segments.empty()) {
      const LocalPoint from = out.segments.back().back();
      std::optional<PathSegment> leg;
      if (travel != nullptr) {
        leg = travel->connect(from, pass.entry, SegmentMode::kTurn);
      } else if (dist(from, pass.entry) > kEps) {
        leg = PathSegment{{from, pass.entry}, SegmentMode::kTurn, region_id};
      }
      if (leg) {
        leg->region = region_id;
        out.segments.push_back(std::move(*leg));
      }
    }
    out.segments.insert(out.segments.end(), pass.segments.begin(), pass.segments.end());
  };
  append(serpentine(pieces[first], region_id, theta_deg, profile, from_high_u, first_forward));
  done[first] = true;
  for (std::size_t left = pieces.size() - 1; left > 0; --left) {
    const LocalPoint cur = out.segments.empty() ? LocalPoint{} : out.segments.back().back();
    std::optional<RegionPass> best;
    std::size_t best_i = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (done[i]) continue;
      for (bool high : {false, true}) {
        for (bool fwd : {true, false}) {
          RegionPass cand = serpentine(pieces[i], region_id, theta_deg, profile, high, fwd);
          if (cand.segments.empty()) continue;
          const double d = dist(cur, cand.entry);
          if (d < best_d - 1e-12) {
            best_d = d;
            best = std::move(cand);
            best_i = i;
          }
        }
      }
    }
    if (!best) break;
    done[best_i] = true;
    append(std::move(*best));
  }
  if (!out.segments.empty()) {
    out.entry = out.segments.front().front();
    out.exit = out.segments.back().back();
  }
  return out;
}

}  // namespace

std::vector<PathSegment> generate_tracks(const GridMap& regions, int region_id, double theta_deg,
                                         const MowerProfile& profile) {
  RegionPass pass = region_pass(region_pieces(regions, region_id, theta_deg, profile), region_id, theta_deg,
                                profile, false, true, nullptr);
  std::vector<PathSegment> mow;
  for (auto& s : pass.segments) {
    if (s.mode == SegmentMode::kMow) mow.push_back(std::move(s));
  }
  return mow;
}

std::vector<PathSegment> border_loop(const geo::LocalPolygon& polygon, const MowerProfile& profile,
                                     std::vector<std::string>* warnings) {
  namespace bg = boost::geometry;
  using BPoint = bg::model::d2::point_xy<double>;
  using BPolygon = bg::model::polygon<BPoint, false, true>;
  using BMulti = bg::model::multi_polygon<BPolygon>;

  profile.validate();
  BPolygon poly;
  for (const LocalPoint& p : polygon.outer) poly.outer().push_back({p.x, p.y});
  for (const auto& hole : polygon.holes) {
    poly.inners().emplace_back();
    for (const LocalPoint& p : hole) poly.inners().back().push_back({p.x, p.y});
  }
  bg::correct(poly);

  const double inset = profile.boundary_offset + 0.5 * profile.mowing_width;
  BMulti out;
  bg::buffer(poly, out, bg::strategy::buffer::distance_symmetric<double>(-inset),
             bg::strategy::buffer::side_straight(), bg::strategy::buffer::join_miter(),
             bg::strategy::buffer::end_flat(), bg::strategy::buffer::point_circle(8));

  std::vector<PathSegment> loops;
  auto add_ring = [&](const auto& ring) {
    PathSegment seg;
    seg.mode = SegmentMode::kBorder;
    for (const BPoint& p : ring) push_distinct(seg.points, {p.x(), p.y()});
    if (seg.points.size() >= 3 && dist(seg.points.front(), seg.points.back()) > kEps) {
      seg.points.push_back(seg.points.front());
    }
    if (seg.points.size() >= 4) loops.push_back(std::move(seg));
  };
  for (const BPolygon& p : out) add_ring(p.outer());
  for (const BPolygon& p : out) {
    for (const auto& inner : p.inners()) add_ring(inner);
  }
  if (loops.empty() && warnings != nullptr) {
    warnings->push_back("border loop omitted: boundary offset plus half the mowing width exceeds the lawn's inradius");
  }
  return loops;
}

std::vector<RegionChoice> order_regions(const std::vector<std::vector<RegionPass>>& candidates, LocalPoint start) {
  std::vector<RegionChoice> order;
  std::vector<bool> done(candidates.size(), false);
  LocalPoint cur = start;
  while (true) {
    std::optional<RegionChoice> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (done[i]) continue;
      for (std::size_t v = 0; v < candidates[i].size(); ++v) {
        const RegionPass& pass = candidates[i][v];
        if (pass.segments.empty()) continue;
        const double d = dist(cur, pass.entry);
        if (d < best_d - 1e-12) {
          best_d = d;
          best = RegionChoice{static_cast<int>(i), static_cast<int>(v)};
        }
      }
    }
    if (!best) break;
    done[best->region] = true;
    cur = candidates[best->region][best->variant].exit;
    order.push_back(*best);
  }
  return order;
}

namespace {

std::vector<std::vector<RegionPass>> region_candidates(const decompose::Decomposition& decomp,
                                                       const MowerProfile& profile,
                                                       const TravelPlanner* travel = nullptr) {
  std::vector<std::vector<RegionPass>> out(static_cast<std::size_t>(decomp.region_count));
  for (int id = 1; id <= decomp.region_count; ++id) {
    const auto pieces = region_pieces(decomp.regions, id, decomp.theta, profile);
    if (pieces.empty()) continue;
    for (bool high : {false, true}) {
      for (bool fwd : {true, false}) {
        RegionPass pass = region_pass(pieces, id, decomp.theta, profile, high, fwd, travel);
        if (travel != nullptr) {
          // A turn between staggered track ends can cut across a notch in the
          // region outline; such turns follow the lawn instead.
          const double floor = profile.boundary_offset - 0.5 * decomp.regions.resolution;
          for (PathSegment& seg : pass.segments) {
            if (seg.mode != SegmentMode::kTurn || travel->min_clearance(seg) >= floor) continue;
            if (auto detour = travel->connect(seg.front(), seg.back(), SegmentMode::kTurn)) {
              detour->region = id;
              seg = std::move(*detour);
            }
          }
        }
        out[id - 1].push_back(std::move(pass));
      }
    }
  }
  return out;
}

// Closed ring re-started at its vertex nearest to `p`.
PathSegment restart_loop(const PathSegment& loop, LocalPoint p) {
  std::vector<LocalPoint> ring(loop.points.begin(), loop.points.end() - 1);
  std::size_t best = 0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    if (dist(ring[i], p) < dist(ring[best], p) - 1e-12) best = i;
  }
  std::rotate(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(best), ring.end());
  ring.push_back(ring.front());
  return PathSegment{std::move(ring), SegmentMode::kBorder, 0};
}

double nearest_vertex(const PathSegment& seg, LocalPoint p) {
  double best = std::numeric_limits<double>::infinity();
  for (const LocalPoint& q : seg.points) best = std::min(best, dist(p, q));
  return best;
}

}  // namespace

std::vector<int> order_regions(const decompose::Decomposition& decomp, const MowerProfile& profile,
                               LocalPoint start) {
  std::vector<int> ids;
  for (const RegionChoice& c : order_regions(region_candidates(decomp, profile), start)) ids.push_back(c.region + 1);
  return ids;
}

CoveragePlan build_plan(const decompose::Decomposition& decomp, const geo::LocalPolygon& polygon,
                        const GridMap& grid, const MowerProfile& profile, LocalPoint start) {
  profile.validate();
  CoveragePlan plan;
  plan.theta = decomp.theta;
  plan.profile = profile;
  plan.region_count = decomp.region_count;

  const TravelPlanner travel(grid, profile);
  const auto candidates = region_candidates(decomp, profile, &travel);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].empty()) {
      plan.warnings.push_back("region " + std::to_string(i + 1) + " is too narrow for a track");
    }
  }
  std::vector<PathSegment> loops = border_loop(polygon, profile, &plan.warnings);

  LocalPoint cur = start;
  bool placed = false;
  auto move_to = [&](LocalPoint target, SegmentMode mode) {
    if (!placed) return;
    if (auto leg = travel.connect(cur, target, mode)) plan.segments.push_back(std::move(*leg));
  };

  while (!loops.empty()) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < loops.size(); ++i) {
      if (nearest_vertex(loops[i], cur) < nearest_vertex(loops[pick], cur) - 1e-12) pick = i;
    }
    PathSegment loop = restart_loop(loops[pick], cur);
    loops.erase(loops.begin() + static_cast<std::ptrdiff_t>(pick));
    move_to(loop.front(), SegmentMode::kTurn);
    cur = loop.back();
    placed = true;
    plan.segments.push_back(std::move(loop));
  }

  bool first = true;
  for (const RegionChoice& c : order_regions(candidates, cur)) {
    const RegionPass& pass = candidates[c.region][c.variant];
    move_to(pass.entry, first ? SegmentMode::kTurn : SegmentMode::kTravel);
    plan.segments.insert(plan.segments.end(), pass.segments.begin(), pass.segments.end());
    cur = pass.exit;
    placed = true;
    first = false;
  }
  return plan;
}

}  // namespace mowplan::pathgen
