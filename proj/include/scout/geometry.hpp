#pragma once

namespace scout {

// Circle hypothesis: center (x0, y0) and radius r, all in cm.
struct Circle {
  double x0 = 0.0;
  double y0 = 0.0;
  double r = 0.0;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

// Rectangular playing field in cm. Bounds are closed.
struct FieldBounds {
  double x_min = 0.0;
  double x_max = 20.0;
  double y_min = 0.0;
  double y_max = 30.0;

  bool valid() const { return x_min < x_max && y_min < y_max; }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  bool contains(Position p) const { return contains(p.x, p.y); }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

// The disk is closed: the boundary counts as inside.
inline bool contains_point(const Circle& c, double x, double y) {
  const double dx = x - c.x0;
  const double dy = y - c.y0;
  return dx * dx + dy * dy <= c.r * c.r;
}

inline bool contains_point(const Circle& c, Position p) {
  return contains_point(c, p.x, p.y);
}

}  // namespace scout
