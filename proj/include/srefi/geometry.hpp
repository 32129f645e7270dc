#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace srefi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

// Twice the signed area of triangle (a, b, c). Positive when the vertices
// wind clockwise on screen (y axis points down).
inline double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross(b - a, c - a);
}

// Sign of the orientation determinant, exact. Uses a double-precision fast
// path with a static error filter and falls back to rational arithmetic on
// near-degenerate inputs.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

// Sign of the incircle determinant for the circle through (a, b, c), with
// the same filtered-exact scheme. For a positively oriented (a, b, c) the
// result is > 0 when d lies strictly inside the circumcircle, 0 when
// cocircular, < 0 outside. Orientation of (a, b, c) flips the sign.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Andrew monotone chain. Returns hull vertices in order; collinear points on
// the hull boundary are dropped. Input order does not matter.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

// True when p lies inside the convex polygon or on its boundary. The polygon
// must be a consistent-winding convex ring.
bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& poly);

// Pushes every vertex of a convex polygon radially away from the polygon
// centroid by `margin` pixels. A cheap uniform-ish dilation good enough for
// region labeling tolerances.
std::vector<Vec2> dilate_polygon(const std::vector<Vec2>& poly, double margin);

double polygon_area(const std::vector<Vec2>& poly);

}  // namespace srefi
