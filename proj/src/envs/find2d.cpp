#include "roto/envs/find2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "roto/envs/rules.hpp"

namespace roto::envs {

namespace {

Vec2 elbow(double q1) { return Find2d::kLink1 * Vec2(std::cos(q1), std::sin(q1)); }

}  // namespace

std::array<Find2d::Capsule, 6> Find2d::arm_capsules(double q1, double q2) {
  const Vec2 e = elbow(q1);
  const double phi = q1 + q2;
  const Vec2 u(std::cos(phi), std::sin(phi));
  const Vec2 n(-u.y(), u.x());
  const Vec2 w = e + kLink2 * u;
  const Vec2 left = w + kFingerOffset * n;
  const Vec2 right = w - kFingerOffset * n;
  return {{
      {Vec2::Zero(), e, kLinkRadius, -1},
      {e, w, kLinkRadius, -1},
      {w, left, kFingerRadius, 0},
      {w, right, kFingerRadius, 1},
      {left, left + kFingerLength * u, kFingerRadius, 0},
      {right, right + kFingerLength * u, kFingerRadius, 1},
  }};
}

Vec2 Find2d::end_effector(double q1, double q2) {
  const double phi = q1 + q2;
  const Vec2 u(std::cos(phi), std::sin(phi));
  return elbow(q1) + (kLink2 + kCenterOffset) * u;
}

Find2d::Find2d(const EnvConfig& cfg) : cfg_(cfg) {}

void Find2d::set_state(std::span<const double> s) {
  if (s.size() != s_.size()) throw std::invalid_argument("Find2d::set_state: size mismatch");
  std::copy(s.begin(), s.end(), s_.begin());
}

double Find2d::distance() const {
  const Vec2 ee = end_effector(s_[kTheta], s_[kTheta + 1]);
  return (ee - Vec2(s_[kDisc], s_[kDisc + 1])).norm();
}

bool Find2d::arm_overlaps_disc(double margin) const {
  const Vec2 disc(s_[kDisc], s_[kDisc + 1]);
  for (const auto& c : arm_capsules(s_[kTheta], s_[kTheta + 1])) {
    if (circle_capsule(disc, kDiscRadius + margin, c.a, c.b, c.radius).hit) return true;
  }
  return false;
}

void Find2d::reset(numerics::Rng& rng) {
  s_.fill(0.0);
  s_[kDisc] = rng.uniform(kBoxXLo, kBoxXHi);
  s_[kDisc + 1] = rng.uniform(kBoxYLo, kBoxYHi);
  const double jitter = cfg_.home_jitter_deg * std::numbers::pi / 180.0;
  // Resample the arm perturbation (not the disc) until the arm is clear, so
  // disc placement stays uniform over the box.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (int j = 0; j < 2; ++j) {
      s_[kTheta + j] = std::clamp(kHome[static_cast<size_t>(j)] + rng.uniform(-jitter, jitter),
                                  kLower[static_cast<size_t>(j)], kUpper[static_cast<size_t>(j)]);
    }
    if (!cfg_.object_present || !arm_overlaps_disc(kSpawnClearance)) return;
  }
  throw std::runtime_error("Find2d::reset: could not find a clear spawn");
}

void Find2d::substep(const std::array<double, 2>& target, std::vector<SubstepSnapshot>* trace,
                     std::array<bool, 2>& fired) {
  const double dt = cfg_.physics_dt;
  double v[2];
  for (int j = 0; j < 2; ++j) {
    v[j] = servo_velocity(target[static_cast<size_t>(j)], s_[kTheta + j], kServoGain, kServoMaxVel);
  }
  const double sweep = (std::abs(v[0]) * kReach1 + std::abs(v[1]) * kReach2) * dt;
  if (sweep > kMaxSubstepDisplacement) {
    const double k = kMaxSubstepDisplacement / sweep;
    v[0] *= k;
    v[1] *= k;
  }
  auto clamp_joints = [&] {
    for (int j = 0; j < 2; ++j) {
      const double lo = kLower[static_cast<size_t>(j)], hi = kUpper[static_cast<size_t>(j)];
      if (s_[kTheta + j] < lo || s_[kTheta + j] > hi) {
        s_[kTheta + j] = std::clamp(s_[kTheta + j], lo, hi);
        v[j] = 0.0;
      }
    }
  };
  for (int j = 0; j < 2; ++j) s_[kTheta + j] += v[j] * dt;
  clamp_joints();
  s_[kThetaDot] = v[0];
  s_[kThetaDot + 1] = v[1];

  struct Contact {
    Overlap ov;
    int capsule;
  };
  std::vector<Contact> contacts;
  const auto caps = arm_capsules(s_[kTheta], s_[kTheta + 1]);
  if (cfg_.object_present) {
    const Vec2 disc(s_[kDisc], s_[kDisc + 1]);
    for (int c = 0; c < static_cast<int>(caps.size()); ++c) {
      const auto& cap = caps[static_cast<size_t>(c)];
      Overlap ov = circle_capsule(disc, kDiscRadius, cap.a, cap.b, cap.radius);
      if (ov.hit) contacts.push_back({ov, c});
    }
  }
  if (trace) {
    SubstepSnapshot snap;
    snap.state.assign(s_.begin(), s_.end());
    for (const auto& c : contacts) {
      const int sensor = caps[static_cast<size_t>(c.capsule)].sensor;
      if (sensor >= 0) snap.detected_sensors.push_back(sensor);
    }
    trace->push_back(std::move(snap));
  }

  // Single sequential pass in joint space with unit inertia and zero restitution.
  const Vec2 e = caps[0].b;  // elbow at detection time
  for (const auto& c : contacts) {
    const int sensor = caps[static_cast<size_t>(c.capsule)].sensor;
    if (sensor >= 0) fired[static_cast<size_t>(sensor)] = true;
    const Vec2 n_arm = -c.ov.normal;  // push the arm away from the disc
    const Vec2 p = c.ov.point;
    const Vec2 col1 = perp_velocity(1.0, p);
    const Vec2 col2 = c.capsule == 0 ? Vec2::Zero() : perp_velocity(1.0, Vec2(p - e));
    const double w1 = n_arm.dot(col1), w2 = n_arm.dot(col2);
    const double ww = w1 * w1 + w2 * w2;
    if (ww < 1e-12) continue;
    const double vn = w1 * v[0] + w2 * v[1];
    if (vn < 0.0) {
      v[0] -= w1 * vn / ww;
      v[1] -= w2 * vn / ww;
    }
    s_[kTheta] += w1 * c.ov.depth / ww;
    s_[kTheta + 1] += w2 * c.ov.depth / ww;
  }
  clamp_joints();
  s_[kThetaDot] = v[0];
  s_[kThetaDot + 1] = v[1];
}

void Find2d::step(std::span<const double> action, std::vector<SubstepSnapshot>* trace) {
  std::array<double, 2> target{};
  for (int j = 0; j < 2; ++j) {
    s_[kAction + j] = action[static_cast<size_t>(j)];
    target[static_cast<size_t>(j)] = action_to_target(action[static_cast<size_t>(j)],
                                                      kLower[static_cast<size_t>(j)],
                                                      kUpper[static_cast<size_t>(j)]);
  }
  std::array<bool, 2> fired{false, false};
  for (int k = 0; k < cfg_.control_substeps; ++k) substep(target, trace, fired);
  s_[kContact] = fired[0] ? 1.0 : 0.0;
  s_[kContact + 1] = fired[1] ? 1.0 : 0.0;
}

void Find2d::write_prop(std::span<double> out) const {
  const double q1 = s_[kTheta], q2 = s_[kTheta + 1];
  const Vec2 ee = end_effector(q1, q2);
  out[0] = s_[kAction];
  out[1] = s_[kAction + 1];
  out[2] = normalize_joint(q1, kLower[0], kUpper[0]);
  out[3] = normalize_joint(q2, kLower[1], kUpper[1]);
  out[4] = s_[kThetaDot] * kVelScale;
  out[5] = s_[kThetaDot + 1] * kVelScale;
  out[6] = ee.x();
  out[7] = ee.y();
  out[8] = std::cos(q1 + q2);
  out[9] = std::sin(q1 + q2);
}

void Find2d::write_tact(std::span<double> out) const {
  out[0] = s_[kContact];
  out[1] = s_[kContact + 1];
}

void Find2d::write_terms(std::span<double> out) const { out[0] = r_dist(distance()); }

void Find2d::write_ground_truth(std::span<double> out) const {
  const Vec2 ee = end_effector(s_[kTheta], s_[kTheta + 1]);
  out[0] = s_[kDisc];
  out[1] = s_[kDisc + 1];
  out[2] = ee.x();
  out[3] = ee.y();
  out[4] = distance();
}

StepEvents Find2d::events() const {
  StepEvents ev;
  ev.contact = s_[kContact] != 0.0 || s_[kContact + 1] != 0.0;
  ev.distance = distance();
  return ev;
}

}  // namespace roto::envs
