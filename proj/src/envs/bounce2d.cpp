#include "roto/envs/bounce2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roto::envs {

Bounce2d::Paddle Bounce2d::paddle_geometry(double x, double z, double tilt) {
  Paddle p;
  p.center = Vec2(x, z);
  const Vec2 u(std::cos(tilt), std::sin(tilt));
  p.a = p.center - 0.5 * kPaddleLength * u;
  p.b = p.center + 0.5 * kPaddleLength * u;
  p.normal = Vec2(-u.y(), u.x());
  return p;
}

Bounce2d::Bounce2d(const EnvConfig& cfg) : cfg_(cfg) {}

void Bounce2d::set_state(std::span<const double> s) {
  if (s.size() != s_.size()) throw std::invalid_argument("Bounce2d::set_state: size mismatch");
  std::copy(s.begin(), s.end(), s_.begin());
}

void Bounce2d::reset(numerics::Rng& rng) {
  s_.fill(0.0);
  for (int j = 0; j < 3; ++j) {
    const double lo = kLower[static_cast<size_t>(j)], hi = kUpper[static_cast<size_t>(j)];
    const double half = cfg_.home_jitter_fraction * (hi - lo);
    s_[kPaddle + j] = std::clamp(0.5 * (lo + hi) + rng.uniform(-half, half), lo, hi);
  }
  s_[kBall] = kBallX + rng.uniform(-cfg_.object_jitter, cfg_.object_jitter);
  s_[kBall + 1] = kBallZ + rng.uniform(-cfg_.object_jitter, cfg_.object_jitter);
  s_[kSide] = 1.0;
}

void Bounce2d::substep(const std::array<double, 3>& target, std::vector<SubstepSnapshot>* trace,
                       std::array<bool, kSegments>& fired) {
  const double dt = cfg_.physics_dt;
  double v[3];
  for (int j = 0; j < 3; ++j) {
    v[j] = servo_velocity(target[static_cast<size_t>(j)], s_[kPaddle + j], kServoGain, kServoMaxVel);
  }
  const double sweep = (std::hypot(v[0], v[1]) + std::abs(v[2]) * 0.5 * kPaddleLength) * dt;
  if (sweep > kMaxSubstepDisplacement) {
    const double k = kMaxSubstepDisplacement / sweep;
    for (double& x : v) x *= k;
  }
  for (int j = 0; j < 3; ++j) {
    const double lo = kLower[static_cast<size_t>(j)], hi = kUpper[static_cast<size_t>(j)];
    s_[kPaddle + j] += v[j] * dt;
    if (s_[kPaddle + j] < lo || s_[kPaddle + j] > hi) {
      s_[kPaddle + j] = std::clamp(s_[kPaddle + j], lo, hi);
      v[j] = 0.0;
    }
    s_[kPaddleVel + j] = v[j];
  }

  if (cfg_.object_present) {
    s_[kBallVel + 1] -= kGravity * dt;
    s_[kBall] += s_[kBallVel] * dt;
    s_[kBall + 1] += s_[kBallVel + 1] * dt;
  }

  const Paddle pad = paddle_geometry(s_[kPaddle], s_[kPaddle + 1], s_[kPaddle + 2]);
  Vec2 ball(s_[kBall], s_[kBall + 1]);
  const Overlap ov = cfg_.object_present
                         ? circle_capsule(ball, kBallRadius, pad.a, pad.b, 0.0)
                         : Overlap{};
  const int sensor = std::min(kSegments - 1, static_cast<int>(ov.t * kSegments));
  if (trace) {
    SubstepSnapshot snap;
    snap.state.assign(s_.begin(), s_.end());
    if (ov.hit) snap.detected_sensors.push_back(sensor);
    trace->push_back(std::move(snap));
  }
  if (ov.hit) {
    fired[static_cast<size_t>(sensor)] = true;
    Vec2 n = ov.normal;
    double depth = ov.depth;
    if (ov.t > 0.0 && ov.t < 1.0) {
      // Face contact: push back to the side the ball came from, even if the
      // centre crossed the paddle line this substep.
      const double side = s_[kSide];
      n = side * pad.normal;
      depth = kBallRadius - side * (ball - pad.center).dot(pad.normal);
    }
    const Vec2 v_kin = Vec2(v[0], v[1]) + perp_velocity(v[2], Vec2(ov.point - pad.center));
    const Vec2 vb = kinematic_impulse(Vec2(s_[kBallVel], s_[kBallVel + 1]), v_kin, n, kRestitution);
    s_[kBallVel] = vb.x();
    s_[kBallVel + 1] = vb.y();
    ball += depth * n;
    s_[kBall] = ball.x();
    s_[kBall + 1] = ball.y();
  } else {
    s_[kSide] = (ball - pad.center).dot(pad.normal) >= 0.0 ? 1.0 : -1.0;
  }
}

void Bounce2d::step(std::span<const double> action, std::vector<SubstepSnapshot>* trace) {
  std::array<double, 3> target{};
  for (int j = 0; j < 3; ++j) {
    s_[kAction + j] = action[static_cast<size_t>(j)];
    target[static_cast<size_t>(j)] = action_to_target(
        action[static_cast<size_t>(j)], kLower[static_cast<size_t>(j)], kUpper[static_cast<size_t>(j)]);
  }
  std::array<bool, kSegments> fired{};
  for (int k = 0; k < cfg_.control_substeps; ++k) substep(target, trace, fired);
  bool any = false;
  for (int i = 0; i < kSegments; ++i) {
    s_[kContact + i] = fired[static_cast<size_t>(i)] ? 1.0 : 0.0;
    any = any || fired[static_cast<size_t>(i)];
  }
  BounceCounter counter;
  counter.restore(static_cast<int>(s_[kNoContactSteps]), static_cast<int64_t>(s_[kBounces]));
  s_[kBounceFlag] = counter.update(any) ? 1.0 : 0.0;
  s_[kNoContactSteps] = counter.steps_without_contact();
  s_[kBounces] = static_cast<double>(counter.bounces());
  const bool fell = cfg_.object_present && (std::abs(s_[kBall]) > kFallX || s_[kBall + 1] < 0.0);
  s_[kFell] = fell ? 1.0 : 0.0;
}

void Bounce2d::write_prop(std::span<double> out) const {
  for (int j = 0; j < 3; ++j) {
    out[static_cast<size_t>(j)] = s_[kAction + j];
    out[static_cast<size_t>(3 + j)] =
        normalize_joint(s_[kPaddle + j], kLower[static_cast<size_t>(j)], kUpper[static_cast<size_t>(j)]);
    out[static_cast<size_t>(6 + j)] = s_[kPaddleVel + j] * kVelScale;
  }
}

void Bounce2d::write_tact(std::span<double> out) const {
  for (int i = 0; i < kSegments; ++i) out[static_cast<size_t>(i)] = s_[kContact + i];
}

void Bounce2d::write_terms(std::span<double> out) const {
  bool any = false;
  for (int i = 0; i < kSegments; ++i) any = any || s_[kContact + i] != 0.0;
  out[0] = any ? 0.0 : 1.0;                   // air
  out[1] = s_[kBounceFlag];                   // bounce
  out[2] = s_[kFell] != 0.0 ? -1.0 : 0.0;     // fall
}

void Bounce2d::write_ground_truth(std::span<double> out) const {
  out[0] = s_[kBall];
  out[1] = s_[kBall + 1];
  out[2] = s_[kBallVel];
  out[3] = s_[kBallVel + 1];
  out[4] = s_[kNoContactSteps];
}

StepEvents Bounce2d::events() const {
  StepEvents ev;
  for (int i = 0; i < kSegments; ++i) ev.contact = ev.contact || s_[kContact + i] != 0.0;
  ev.bounce = s_[kBounceFlag] != 0.0;
  ev.distance = s_[kBall + 1];
  return ev;
}

}  // namespace roto::envs
