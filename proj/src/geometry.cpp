#include "marll/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace marll {

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

}  // namespace

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  if (p1 == p2 || q1 == q2) return false;

  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);

  if (o1 == 0 && o2 == 0) {
    // Collinear: the open intervals must overlap with positive length.
    const bool use_x = std::abs(p2.x - p1.x) >= std::abs(p2.y - p1.y);
    auto coord = [use_x](Vec2 p) { return use_x ? p.x : p.y; };
    const double lo = std::max(std::min(coord(p1), coord(p2)), std::min(coord(q1), coord(q2)));
    const double hi = std::min(std::max(coord(p1), coord(p2)), std::max(coord(q1), coord(q2)));
    return lo < hi;
  }
  // Any zero orientation left means an endpoint touches the other segment.
  return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace marll
