#pragma once

#include <Eigen/Core>

namespace roto::envs {

using Vec2 = Eigen::Vector2d;

struct SegmentPoint {
  Vec2 point;
  double t = 0.0;  // parameter along a->b, clamped to [0, 1]
};

SegmentPoint closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b);

// Overlap between a circle and a capsule (segment a-b inflated by radius).
struct Overlap {
  bool hit = false;
  Vec2 normal = Vec2::Zero();  // unit, pointing from the capsule towards the circle
  double depth = 0.0;
  Vec2 point = Vec2::Zero();   // closest point on the capsule axis
  double t = 0.0;
};

Overlap circle_capsule(const Vec2& center, double r, const Vec2& a, const Vec2& b, double cap_r);
Overlap circle_circle(const Vec2& c1, double r1, const Vec2& c2, double r2);

// Velocity change for a dynamic body hitting a kinematic one along normal n
// (pointing towards the dynamic body). Only applied when approaching.
Vec2 kinematic_impulse(const Vec2& v, const Vec2& v_kin, const Vec2& n, double restitution);

// Cross product of angular rate w (about z) with r.
inline Vec2 perp_velocity(double w, const Vec2& r) { return {-w * r.y(), w * r.x()}; }

}  // namespace roto::envs
