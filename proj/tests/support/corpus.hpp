#pragma once

// Reconstructed benchmark lawns shared by the unit and acceptance suites.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mowplan/geo.hpp"

namespace mowplan::testing {

using geo::LocalPoint;
using geo::LocalPolygon;
using geo::LocalRing;

inline LocalRing rect_ring(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

inline LocalRing reversed(LocalRing ring) { return LocalRing(ring.rbegin(), ring.rend()); }

inline LocalPolygon rectangle(double w, double h) { return {rect_ring(0, 0, w, h), {}}; }

/// 30 m x 30 m square with a centered 10 m x 10 m obstacle.
inline LocalPolygon hole_map() { return {rect_ring(0, 0, 30, 30), {reversed(rect_ring(10, 10, 20, 20))}}; }

inline LocalPolygon l_shape() {
  return {{{0, 0}, {40, 0}, {40, 15}, {15, 15}, {15, 40}, {0, 40}}, {}};
}

/// Opening faces north.
inline LocalPolygon u_shape() {
  return {{{0, 0}, {40, 0}, {40, 35}, {28, 35}, {28, 12}, {12, 12}, {12, 35}, {0, 35}}, {}};
}

inline LocalPolygon ring_map() { return {rect_ring(0, 0, 40, 40), {reversed(rect_ring(12, 12, 28, 28))}}; }

inline LocalPolygon rect_with_hole() {
  return {rect_ring(0, 0, 50, 30), {reversed(rect_ring(30, 8, 40, 20))}};
}

inline LocalPolygon two_holes() {
  return {rect_ring(0, 0, 50, 35),
          {reversed(rect_ring(8, 8, 18, 16)), reversed(rect_ring(30, 18, 42, 27))}};
}

inline LocalRing rotate_ring(const LocalRing& ring, double deg, LocalPoint pivot) {
  const double a = deg * std::numbers::pi / 180.0;
  const double c = std::cos(a), s = std::sin(a);
  LocalRing out;
  for (const LocalPoint& p : ring) {
    const double dx = p.x - pivot.x, dy = p.y - pivot.y;
    out.push_back({pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy});
  }
  return out;
}

inline LocalPolygon rotate(const LocalPolygon& poly, double deg, LocalPoint pivot) {
  LocalPolygon out{rotate_ring(poly.outer, deg, pivot), {}};
  for (const auto& h : poly.holes) out.holes.push_back(rotate_ring(h, deg, pivot));
  return out;
}

struct NamedShape {
  std::string name;
  LocalPolygon polygon;
};

/// The acceptance corpus: plain shapes plus rotated variants.
inline std::vector<NamedShape> corpus() {
  return {
      {"rectangle", rectangle(40, 30)},
      {"l_shape", l_shape()},
      {"u_shape", u_shape()},
      {"ring", ring_map()},
      {"hole_map", hole_map()},
      {"rect_with_hole", rect_with_hole()},
      {"two_holes", two_holes()},
      {"hole_map_rot36", rotate(hole_map(), 36, {15, 15})},
      {"l_shape_rot20", rotate(l_shape(), 20, {20, 20})},
      {"u_shape_rot60", rotate(u_shape(), 60, {20, 17.5})},
      {"two_holes_rot15", rotate(two_holes(), 15, {25, 17.5})},
  };
}

}  // namespace mowplan::testing
