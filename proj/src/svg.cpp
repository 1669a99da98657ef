#include "mowplan/svg.hpp"

#include <cstdio>
#include <map>
#include <utility>

namespace mowplan::io {

using pathgen::SegmentMode;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

struct Canvas {
  double x0, y1;  // local x of the left edge, local y of the top edge
  std::string pt(double x, double y) const { return num(x - x0) + "," + num(y1 - y); }
};

void polyline(std::string& out, const Canvas& cv, const pathgen::PathSegment& s, const char* cls) {
  out += "<polyline class=\"";
  out += cls;
  out += "\" points=\"";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (i) out += ' ';
    out += cv.pt(s.points[i].x, s.points[i].y);
  }
  out += "\"/>\n";
}

}  // namespace

std::string render_preview(const pathgen::CoveragePlan& plan, const decompose::Decomposition& decomp,
                           const raster::GridMap& grid) {
  const double res = grid.resolution;
  const double w = grid.width * res, h = grid.height * res;
  const Canvas cv{grid.origin.x - 0.5 * res, grid.origin.y - 0.5 * res + h};
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\" width=\"" +
         num(w * 10) + "\" height=\"" + num(h * 10) + "\">\n";
  out +=
      "<style>.lawn{fill:#cfe8c0}.separator{stroke:#d62728;fill:none;stroke-width:0.15}"
      ".mow,.border{stroke:#1f5fd6;fill:none;stroke-width:0.1}"
      ".turn{stroke:#1f5fd6;fill:none;stroke-width:0.05;stroke-dasharray:0.2 0.1}"
      ".travel{stroke:#f2c500;fill:none;stroke-width:0.12}</style>\n";

  // Lawn as merged horizontal runs, one path.
  std::string lawn;
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width;) {
      if (!grid.at(c, r).is_free()) {
        ++c;
        continue;
      }
      int e = c;
      while (e + 1 < grid.width && grid.at(e + 1, r).is_free()) ++e;
      const double x = grid.origin.x + (c - 0.5) * res, y = grid.origin.y + (r + 0.5) * res;
      lawn += "M" + cv.pt(x, y) + "h" + num((e - c + 1) * res) + "v" + num(res) + "h" + num(-(e - c + 1) * res) + "z";
      c = e + 1;
    }
  }
  if (!lawn.empty()) out += "<path class=\"lawn\" d=\"" + lawn + "\"/>\n";

  // Cell edges between different regions, grouped by region pair.
  const raster::GridMap& labels = decomp.regions;
  std::map<std::pair<int, int>, std::string> seps;
  if (labels.width == grid.width && labels.height == grid.height) {
    auto id = [&](int c, int r) { return labels.contains(c, r) ? labels.at(c, r).region_id() : 0; };
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (int r = 0; r < labels.height; ++r) {
      for (int c = 0; c < labels.width; ++c) {
        const int a = id(c, r);
        if (a == 0) continue;
        const double x = labels.origin.x + (c + 0.5) * res, y = labels.origin.y + (r - 0.5) * res;
        if (const int b = id(c + 1, r); b != 0 && b != a) {
          seps[key(a, b)] += "M" + cv.pt(x, y) + "v" + num(-res);
        }
        if (const int b = id(c, r + 1); b != 0 && b != a) {
          seps[key(a, b)] += "M" + cv.pt(x - res, y + res) + "h" + num(res);
        }
      }
    }
  }
  for (const auto& [pair, d] : seps) {
    out += "<path class=\"separator\" data-regions=\"" + std::to_string(pair.first) + "-" +
           std::to_string(pair.second) + "\" d=\"" + d + "\"/>\n";
  }

  for (const auto& s : plan.segments) polyline(out, cv, s, pathgen::to_string(s.mode));
  out += "</svg>\n";
  return out;
}

}  // namespace mowplan::io
