#include "qiup/objects.hpp"

#include <cmath>

#include "qiup/errors.hpp"

namespace qiup::objects {

namespace {

struct Ellipse {
  double cx, cy, rx, ry;
  bool contains(double x, double y) const {
    const double u = (x - cx) / rx, v = (y - cy) / ry;
    return u * u + v * v <= 1.0;
  }
};

bool in_triangle(double x, double y, double ax, double ay, double bx, double by, double cx, double cy) {
  auto side = [](double px, double py, double qx, double qy, double rx, double ry) {
    return (qx - px) * (ry - py) - (qy - py) * (rx - px);
  };
  const double d1 = side(ax, ay, bx, by, x, y);
  const double d2 = side(bx, by, cx, cy, x, y);
  const double d3 = side(cx, cy, ax, ay, x, y);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

// Unit coordinates: u, v in [-1, 1] across the grid, v pointing down.
bool in_cat(double u, double v) {
  const Ellipse head{0.0, -0.35, 0.32, 0.28};
  const Ellipse body{0.0, 0.35, 0.42, 0.45};
  if (head.contains(u, v) || body.contains(u, v)) return true;
  if (in_triangle(u, v, -0.30, -0.45, -0.05, -0.55, -0.25, -0.85)) return true;
  if (in_triangle(u, v, 0.30, -0.45, 0.05, -0.55, 0.25, -0.85)) return true;
  // tail
  return std::abs(v - (0.55 - 0.6 * (u - 0.4))) < 0.06 && u > 0.35 && u < 0.85;
}

}  // namespace

const std::vector<std::string>& shape_names() {
  static const std::vector<std::string> names{"empty", "opaque", "knife-edge", "cat",
                                              "dot",   "phase-bump", "patch"};
  return names;
}

imaging::ObjectMap make_object(const std::string& shape, std::size_t rows, std::size_t cols,
                               double pitch_m) {
  ComplexGrid t(rows, cols, pitch_m, Complex{1.0, 0.0});
  const double half_w = 0.5 * static_cast<double>(cols) * pitch_m;
  const double half_h = 0.5 * static_cast<double>(rows) * pitch_m;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = t.x(c), y = t.y(r);
      const double u = x / half_w, v = y / half_h;
      Complex& val = t(r, c);
      if (shape == "empty") {
      } else if (shape == "opaque") {
        val = 0.0;
      } else if (shape == "knife-edge") {
        val = x >= 0.0 ? 1.0 : 0.0;
      } else if (shape == "cat") {
        val = in_cat(u, v) ? 1.0 : 0.0;
      } else if (shape == "dot") {
        const double dx = x / pitch_m - static_cast<double>(cols) / 6.0;
        const double dy = y / pitch_m - static_cast<double>(rows) / 8.0;
        val = dx * dx + dy * dy <= 9.0 ? 0.0 : 1.0;
      } else if (shape == "phase-bump") {
        const double s = 1.0 / 3.0;
        val = std::polar(1.0, 1.5 * std::exp(-(u * u + v * v) / (2.0 * s * s)));
      } else if (shape == "patch") {
        val = std::abs(u) < 0.5 && std::abs(v) < 0.5 ? 0.3 : 1.0;
      } else {
        throw ValidationError("unknown object shape '" + shape + "'");
      }
    }
  return imaging::ObjectMap(std::move(t));
}

}  // namespace qiup::objects
