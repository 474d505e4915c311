#include "roto/envs/contact2d.hpp"

#include <algorithm>
#include <cmath>

namespace roto::envs {

SegmentPoint closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {a + t * ab, t};
}

Overlap circle_capsule(const Vec2& center, double r, const Vec2& a, const Vec2& b, double cap_r) {
  Overlap out;
  const SegmentPoint sp = closest_point_on_segment(center, a, b);
  const Vec2 d = center - sp.point;
  const double dist = d.norm();
  out.point = sp.point;
  out.t = sp.t;
  if (dist >= r + cap_r) return out;
  out.hit = true;
  out.depth = r + cap_r - dist;
  if (dist > 1e-12) {
    out.normal = d / dist;
  } else {
    // Degenerate: centre on the axis. Use the segment's left-hand normal.
    const Vec2 ab = b - a;
    out.normal = ab.norm() > 0.0 ? Vec2(-ab.y(), ab.x()).normalized() : Vec2(0.0, 1.0);
  }
  return out;
}

Overlap circle_circle(const Vec2& c1, double r1, const Vec2& c2, double r2) {
  // Treat circle 2 as a zero-length capsule.
  return circle_capsule(c1, r1, c2, c2, r2);
}

Vec2 kinematic_impulse(const Vec2& v, const Vec2& v_kin, const Vec2& n, double restitution) {
  const double vn = (v - v_kin).dot(n);
  if (vn >= 0.0) return v;
  return v - (1.0 + restitution) * vn * n;
}

}  // namespace roto::envs
