#pragma once

// Plain geometric oracles, written independently of the library code.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "mowplan/geo.hpp"

namespace mowplan::testing {

inline bool inside_ring(const geo::LocalRing& ring, geo::LocalPoint p) {
  int winding = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const geo::LocalPoint a = ring[i], b = ring[(i + 1) % ring.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && cross > 0) ++winding;
    } else if (b.y <= p.y && cross < 0) {
      --winding;
    }
  }
  return winding != 0;
}

inline bool inside(const geo::LocalPolygon& poly, geo::LocalPoint p) {
  if (!inside_ring(poly.outer, p)) return false;
  for (const auto& h : poly.holes)
    if (inside_ring(h, p)) return false;
  return true;
}

inline double segment_distance(geo::LocalPoint p, geo::LocalPoint a, geo::LocalPoint b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline double ring_distance(const geo::LocalRing& ring, geo::LocalPoint p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ring.size(); ++i) {
    best = std::min(best, segment_distance(p, ring[i], ring[(i + 1) % ring.size()]));
  }
  return best;
}

/// Distance from p to the nearest boundary or hole edge.
inline double boundary_distance(const geo::LocalPolygon& poly, geo::LocalPoint p) {
  double best = ring_distance(poly.outer, p);
  for (const auto& h : poly.holes) best = std::min(best, ring_distance(h, p));
  return best;
}

/// A rectangle lawn with up to three disjoint rectangular obstacles, all well
/// inside so that the lawn stays connected.
inline geo::LocalPolygon random_polygon(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> size(14.0, 26.0);
  const double w = size(rng), h = size(rng);
  geo::LocalPolygon poly{{{0, 0}, {w, 0}, {w, h}, {0, h}}, {}};
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_real_distribution<double> ext(1.5, 4.0);
  const int n = count(rng);
  std::vector<std::array<double, 4>> boxes;
  for (int tries = 0; tries < 50 && static_cast<int>(boxes.size()) < n; ++tries) {
    const double bw = ext(rng), bh = ext(rng);
    std::uniform_real_distribution<double> px(3.0, w - 3.0 - bw), py(3.0, h - 3.0 - bh);
    const double x0 = px(rng), y0 = py(rng);
    bool clash = false;
    for (const auto& b : boxes) {
      if (x0 < b[2] + 3.0 && b[0] < x0 + bw + 3.0 && y0 < b[3] + 3.0 && b[1] < y0 + bh + 3.0) clash = true;
    }
    if (clash) continue;
    boxes.push_back({x0, y0, x0 + bw, y0 + bh});
    poly.holes.push_back({{x0, y0}, {x0, y0 + bh}, {x0 + bw, y0 + bh}, {x0 + bw, y0}});
  }
  return poly;
}

}  // namespace mowplan::testing
