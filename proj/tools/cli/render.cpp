#include "render.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "commands.hpp"
#include "hmcert/error.hpp"

namespace hmcert::cli {

namespace {

// Spokes stop just short of the circle, where eval_w is still defined.
constexpr double kSpokeEnd = 1.0 - 1e-6;

void grow(Rendering& r, const Polyline& p) {
  for (const Point& z : p.points) {
    r.lo = {std::min(r.lo.real(), z.real()), std::min(r.lo.imag(), z.imag())};
    r.hi = {std::max(r.hi.real(), z.real()), std::max(r.hi.imag(), z.imag())};
  }
}

void points_attr(std::ostringstream& os, const Polyline& p) {
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    if (i) os << ' ';
    os << num(p.points[i].real()) << ',' << num(-p.points[i].imag());
  }
}

}  // namespace

Rendering render_map(const HarmonicMap& hm, int rings, int spokes, const JordanCurve* curve) {
  if (rings < 2 || spokes < 2) throw Error(ErrorCode::invalid_params, "render: rings and spokes must be >= 2");
  Rendering r;
  const double inf = std::numeric_limits<double>::infinity();
  r.lo = {inf, inf};
  r.hi = {-inf, -inf};
  const int n = kPolylinePoints;

  for (int i = 1; i <= rings; ++i) {
    const double rad = static_cast<double>(i) / (rings + 1);
    Polyline p;
    p.closed = true;
    for (int j = 0; j < n; ++j) p.points.push_back(eval_w(hm, std::polar(rad, kTwoPi * j / n)));
    grow(r, p);
    r.rings.push_back(std::move(p));
  }
  for (int i = 0; i < spokes; ++i) {
    const double theta = kTwoPi * i / spokes;
    Polyline p;
    for (int j = 0; j < n; ++j) p.points.push_back(eval_w(hm, std::polar(kSpokeEnd * j / (n - 1), theta)));
    grow(r, p);
    r.spokes.push_back(std::move(p));
  }
  if (curve != nullptr) {
    Polyline p;
    p.closed = true;
    for (int j = 0; j < n; ++j) p.points.push_back(curve->position(curve->length() * j / n));
    grow(r, p);
    r.boundary.push_back(std::move(p));
  }
  return r;
}

std::string to_svg(const Rendering& r, double stroke_width) {
  const double w = r.hi.real() - r.lo.real();
  const double h = r.hi.imag() - r.lo.imag();
  const double extent = std::max({w, h, 1e-12});
  const double m = 0.05 * extent;
  const double sw = stroke_width > 0.0 ? stroke_width : 0.003 * extent;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(r.lo.real() - m) << ' '
     << num(-r.hi.imag() - m) << ' ' << num(w + 2 * m) << ' ' << num(h + 2 * m) << "\">\n";
  auto group = [&](const char* id, const char* colour, const std::vector<Polyline>& lines) {
    if (lines.empty()) return;
    os << "<g id=\"" << id << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << num(sw) << "\">\n";
    for (const Polyline& p : lines) {
      os << (p.closed ? "<polygon points=\"" : "<polyline points=\"");
      points_attr(os, p);
      os << "\"/>\n";
    }
    os << "</g>\n";
  };
  group("rings", "#1f4e9c", r.rings);
  group("spokes", "#9c3d1f", r.spokes);
  group("boundary", "#000000", r.boundary);
  os << "</svg>\n";
  return os.str();
}

}  // namespace hmcert::cli
