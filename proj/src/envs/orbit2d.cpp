#include "roto/envs/orbit2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "roto/envs/rules.hpp"

namespace roto::envs {

Vec2 Orbit2d::target(int index) { return index == 0 ? Vec2(kTargetRadius, 0.0) : Vec2(-kTargetRadius, 0.0); }

Orbit2d::Orbit2d(const EnvConfig& cfg) : cfg_(cfg) {}

void Orbit2d::set_state(std::span<const double> s) {
  if (s.size() != s_.size()) throw std::invalid_argument("Orbit2d::set_state: size mismatch");
  std::copy(s.begin(), s.end(), s_.begin());
}

Vec2 Orbit2d::assigned_target(int i) const {
  // Each disc starts assigned to the target on the opposite side.
  const int base = (i + 1) % 2;
  return target(s_[kAssignment] != 0.0 ? 1 - base : base);
}

bool Orbit2d::pegs_clear_of_discs(double margin) const {
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 2; ++i) {
      if ((peg(j) - disc(i)).norm() < kPegRadius + kDiscRadius + margin) return false;
    }
  }
  return true;
}

void Orbit2d::reset(numerics::Rng& rng) {
  s_.fill(0.0);
  const double jit = cfg_.object_jitter;
  s_[kDiscs] = kTargetRadius + rng.uniform(-jit, jit);
  s_[kDiscs + 1] = rng.uniform(-jit, jit);
  s_[kDiscs + 2] = -kTargetRadius + rng.uniform(-jit, jit);
  s_[kDiscs + 3] = rng.uniform(-jit, jit);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (int c = 0; c < 8; ++c) {
      const double half = cfg_.home_jitter_fraction * 2.0 * kPegHalfRange;
      s_[kPegs + c] = std::clamp(kPegHome[static_cast<size_t>(c)] + rng.uniform(-half, half),
                                 peg_lower(c), peg_upper(c));
    }
    if (!cfg_.pegs_active || pegs_clear_of_discs(kSpawnClearance)) return;
  }
  throw std::runtime_error("Orbit2d::reset: could not find a clear spawn");
}

void Orbit2d::substep(const std::array<double, 8>& tgt, std::vector<SubstepSnapshot>* trace,
                      std::array<bool, kSensors>& fired) {
  const double dt = cfg_.physics_dt;
  for (int j = 0; j < 4; ++j) {
    double vx = servo_velocity(tgt[static_cast<size_t>(2 * j)], s_[kPegs + 2 * j], kServoGain, kServoMaxVel);
    double vy = servo_velocity(tgt[static_cast<size_t>(2 * j + 1)], s_[kPegs + 2 * j + 1], kServoGain,
                               kServoMaxVel);
    const double sweep = std::hypot(vx, vy) * dt;
    if (sweep > kMaxSubstepDisplacement) {
      vx *= kMaxSubstepDisplacement / sweep;
      vy *= kMaxSubstepDisplacement / sweep;
    }
    double vel[2] = {vx, vy};
    for (int c = 0; c < 2; ++c) {
      const int idx = 2 * j + c;
      s_[kPegs + idx] += vel[c] * dt;
      if (s_[kPegs + idx] < peg_lower(idx) || s_[kPegs + idx] > peg_upper(idx)) {
        s_[kPegs + idx] = std::clamp(s_[kPegs + idx], peg_lower(idx), peg_upper(idx));
        vel[c] = 0.0;
      }
      s_[kPegVel + idx] = vel[c];
    }
  }
  const double decay = std::exp(-kDamping * dt);
  for (int c = 0; c < 4; ++c) {
    s_[kDiscVel + c] *= decay;
    s_[kDiscs + c] += s_[kDiscVel + c] * dt;
  }

  enum class Kind { kPeg, kPair, kWall };
  struct Contact {
    Kind kind;
    int disc;
    int peg;
    Vec2 normal;  // towards the (first) disc
    double depth;
  };
  std::vector<Contact> contacts;
  if (cfg_.pegs_active) {
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 2; ++i) {
        const Overlap ov = circle_circle(disc(i), kDiscRadius, peg(j), kPegRadius);
        if (ov.hit) contacts.push_back({Kind::kPeg, i, j, ov.normal, ov.depth});
      }
    }
  }
  {
    const Overlap ov = circle_circle(disc(0), kDiscRadius, disc(1), kDiscRadius);
    if (ov.hit) contacts.push_back({Kind::kPair, 0, -1, ov.normal, ov.depth});
  }
  for (int i = 0; i < 2; ++i) {
    const Vec2 p = disc(i);
    const double rho = p.norm();
    if (rho + kDiscRadius > kDishRadius) {
      const Vec2 n = rho > 1e-12 ? Vec2(-p / rho) : Vec2(1.0, 0.0);
      contacts.push_back({Kind::kWall, i, -1, n, rho + kDiscRadius - kDishRadius});
    }
  }
  auto sensor_of = [](const Contact& c) {
    return c.kind == Kind::kPeg ? c.peg : (c.kind == Kind::kPair ? kDiscDiscSensor : kWallSensor);
  };
  if (trace) {
    SubstepSnapshot snap;
    snap.state.assign(s_.begin(), s_.end());
    for (const auto& c : contacts) snap.detected_sensors.push_back(sensor_of(c));
    trace->push_back(std::move(snap));
  }

  auto set_disc = [&](int i, const Vec2& p, const Vec2& v) {
    s_[kDiscs + 2 * i] = p.x();
    s_[kDiscs + 2 * i + 1] = p.y();
    s_[kDiscVel + 2 * i] = v.x();
    s_[kDiscVel + 2 * i + 1] = v.y();
  };
  for (const auto& c : contacts) {
    fired[static_cast<size_t>(sensor_of(c))] = true;
    if (c.kind == Kind::kPeg) {
      const Vec2 v_peg(s_[kPegVel + 2 * c.peg], s_[kPegVel + 2 * c.peg + 1]);
      set_disc(c.disc, disc(c.disc) + c.depth * c.normal,
               kinematic_impulse(disc_vel(c.disc), v_peg, c.normal, kRestitution));
    } else if (c.kind == Kind::kWall) {
      set_disc(c.disc, disc(c.disc) + c.depth * c.normal,
               kinematic_impulse(disc_vel(c.disc), Vec2::Zero(), c.normal, kRestitution));
    } else {
      Vec2 v0 = disc_vel(0), v1 = disc_vel(1);
      const double rel = (v0 - v1).dot(c.normal);
      if (rel < 0.0) {
        // Equal masses: the impulse is shared evenly.
        const double j = -(1.0 + kRestitution) * rel * 0.5;
        v0 += j * c.normal;
        v1 -= j * c.normal;
      }
      set_disc(0, disc(0) + 0.5 * c.depth * c.normal, v0);
      set_disc(1, disc(1) - 0.5 * c.depth * c.normal, v1);
    }
  }
}

void Orbit2d::step(std::span<const double> action, std::vector<SubstepSnapshot>* trace) {
  std::array<double, 8> tgt{};
  for (int c = 0; c < 8; ++c) {
    s_[kAction + c] = action[static_cast<size_t>(c)];
    tgt[static_cast<size_t>(c)] = action_to_target(action[static_cast<size_t>(c)], peg_lower(c), peg_upper(c));
  }
  std::array<bool, kSensors> fired{};
  for (int k = 0; k < cfg_.control_substeps; ++k) substep(tgt, trace, fired);
  for (int i = 0; i < kSensors; ++i) s_[kContact + i] = fired[static_cast<size_t>(i)] ? 1.0 : 0.0;

  s_[kSwapFlag] = 0.0;
  s_[kRotationFlag] = 0.0;
  if ((disc(0) - assigned_target(0)).norm() < kSwapTolerance &&
      (disc(1) - assigned_target(1)).norm() < kSwapTolerance) {
    RotationCounter counter;
    counter.restore(static_cast<int64_t>(s_[kSwaps]));
    s_[kRotationFlag] = counter.on_swap() ? 1.0 : 0.0;
    s_[kSwaps] = static_cast<double>(counter.swaps());
    s_[kAssignment] = s_[kAssignment] != 0.0 ? 0.0 : 1.0;
    s_[kSwapFlag] = 1.0;
  }
  const bool fell = (disc(0) - disc(1)).norm() > kFallDistance || disc(0).norm() > kDishRadius ||
                    disc(1).norm() > kDishRadius;
  s_[kFell] = fell ? 1.0 : 0.0;
}

void Orbit2d::write_prop(std::span<double> out) const {
  for (int c = 0; c < 8; ++c) {
    out[static_cast<size_t>(c)] = s_[kAction + c];
    out[static_cast<size_t>(8 + c)] = normalize_joint(s_[kPegs + c], peg_lower(c), peg_upper(c));
    out[static_cast<size_t>(16 + c)] = s_[kPegVel + c] * kVelScale;
  }
}

void Orbit2d::write_tact(std::span<double> out) const {
  for (int i = 0; i < kSensors; ++i) out[static_cast<size_t>(i)] = s_[kContact + i];
}

void Orbit2d::write_terms(std::span<double> out) const {
  out[0] = r_dist((disc(0) - assigned_target(0)).norm());
  out[1] = r_dist((disc(1) - assigned_target(1)).norm());
  out[2] = s_[kSwapFlag];
  out[3] = s_[kFell] != 0.0 ? -1.0 : 0.0;
}

void Orbit2d::write_ground_truth(std::span<double> out) const {
  for (int c = 0; c < 4; ++c) {
    out[static_cast<size_t>(c)] = s_[kDiscs + c];
    out[static_cast<size_t>(4 + c)] = s_[kDiscVel + c];
  }
  out[8] = (disc(0) - disc(1)).norm();
}

StepEvents Orbit2d::events() const {
  StepEvents ev;
  for (int i = 0; i < kSensors; ++i) ev.contact = ev.contact || s_[kContact + i] != 0.0;
  ev.swap = s_[kSwapFlag] != 0.0;
  ev.rotation = s_[kRotationFlag] != 0.0;
  ev.distance = 0.5 * ((disc(0) - assigned_target(0)).norm() + (disc(1) - assigned_target(1)).norm());
  return ev;
}

}  // namespace roto::envs
