#pragma once

#include <string>
#include <vector>

#include "hmcert/harmonic.hpp"

namespace hmcert::cli {

inline constexpr int kPolylinePoints = 512;

struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

struct Rendering {
  std::vector<Polyline> rings;
  std::vector<Polyline> spokes;
  std::vector<Polyline> boundary;  // empty or one loop
  Point lo, hi;                    // bounding box of everything drawn
};

/// Images under w of the circles r = i/(rings+1) and of `spokes` radii,
/// each sampled at kPolylinePoints points, plus the curve when given.
Rendering render_map(const HarmonicMap& hm, int rings, int spokes, const JordanCurve* curve = nullptr);

/// viewBox is the bounding box widened by 5% of its larger side on every
/// edge; y is flipped so the picture has the usual orientation.
std::string to_svg(const Rendering& r, double stroke_width = 0.0);

}  // namespace hmcert::cli
