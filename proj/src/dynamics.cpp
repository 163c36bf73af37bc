// Copyright 2026 The socnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "socnav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace socnav {

namespace {

void require_finite(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("non-finite ") + what);
}

void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("dt must be positive and finite");
}

}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

HumanState step_human(const HumanState& s, const HumanAction& u, double dt,
                      const HumanControlBounds& bounds, bool* clamped) {
  require_finite(s.finite(), "human state");
  require_finite(u.finite(), "human action");
  require_dt(dt);

  bool hit = false;
  Vec2 a = u.vec();
  const double a_norm = a.norm();
  if (a_norm > bounds.accel_max) {
    a *= bounds.accel_max / a_norm;
    hit = true;
  }

  HumanState next;
  // Position integrates the pre-clamp-velocity kinematics exactly.
  next.x = s.x + s.vx * dt + 0.5 * a.x() * dt * dt;
  next.y = s.y + s.vy * dt + 0.5 * a.y() * dt * dt;
  next.vx = s.vx + a.x() * dt;
  next.vy = s.vy + a.y() * dt;

  const double speed = next.vel().norm();
  if (speed > bounds.speed_max) {
    const double scale = bounds.speed_max / speed;
    next.vx *= scale;
    next.vy *= scale;
    hit = true;
  }
  if (clamped) *clamped = hit;
  return next;
}

RobotState step_robot(const RobotState& s, const RobotAction& u, double dt,
                      const RobotControlBounds& bounds, bool* clamped) {
  require_finite(s.finite(), "robot state");
  require_finite(u.finite(), "robot action");
  require_dt(dt);

  const double v = std::clamp(u.v, 0.0, bounds.v_max);
  const double w = std::clamp(u.omega, -bounds.omega_max, bounds.omega_max);
  if (clamped) *clamped = (v != u.v) || (w != u.omega);

  RobotState next;
  next.x = s.x + v * std::cos(s.heading) * dt;
  next.y = s.y + v * std::sin(s.heading) * dt;
  next.heading = wrap_angle(s.heading + w * dt);
  return next;
}

HumanTrajectory rollout_human(const HumanState& s0,
                              const std::vector<HumanAction>& controls,
                              double dt, const HumanControlBounds& bounds,
                              bool* clamped) {
  if (controls.empty()) throw std::invalid_argument("empty control sequence");
  HumanTrajectory xi;
  xi.dt = dt;
  xi.start = s0;
  xi.steps.reserve(controls.size());
  bool hit_any = false;
  HumanState s = s0;
  for (const HumanAction& u : controls) {
    bool hit = false;
    s = step_human(s, u, dt, bounds, &hit);
    hit_any |= hit;
    xi.steps.emplace_back(s, u);
  }
  if (clamped) *clamped = hit_any;
  return xi;
}

RobotTrajectory rollout_robot(const RobotState& s0,
                              const std::vector<RobotAction>& controls,
                              double dt, const RobotControlBounds& bounds,
                              bool* clamped) {
  if (controls.empty()) throw std::invalid_argument("empty control sequence");
  RobotTrajectory xi;
  xi.dt = dt;
  xi.start = s0;
  xi.steps.reserve(controls.size());
  bool hit_any = false;
  RobotState s = s0;
  for (const RobotAction& u : controls) {
    bool hit = false;
    s = step_robot(s, u, dt, bounds, &hit);
    hit_any |= hit;
    xi.steps.emplace_back(s, u);
  }
  if (clamped) *clamped = hit_any;
  return xi;
}

double trajectory_consistency_error(const HumanTrajectory& xi,
                                    const HumanControlBounds& bounds) {
  double err = 0.0;
  for (int t = 1; t <= xi.length(); ++t) {
    const HumanState pred =
        step_human(xi.state(t - 1), xi.action(t), xi.dt, bounds);
    const HumanState& got = xi.state(t);
    err = std::max(err, std::abs(pred.x - got.x));
    err = std::max(err, std::abs(pred.y - got.y));
    err = std::max(err, std::abs(pred.vx - got.vx));
    err = std::max(err, std::abs(pred.vy - got.vy));
  }
  return err;
}

double trajectory_consistency_error(const RobotTrajectory& xi,
                                    const RobotControlBounds& bounds) {
  double err = 0.0;
  for (int t = 1; t <= xi.length(); ++t) {
    const RobotState pred =
        step_robot(xi.state(t - 1), xi.action(t), xi.dt, bounds);
    const RobotState& got = xi.state(t);
    err = std::max(err, std::abs(pred.x - got.x));
    err = std::max(err, std::abs(pred.y - got.y));
    err = std::max(err,
                   std::abs(wrap_angle(pred.heading - got.heading)));
  }
  return err;
}

RobotAction goto_goal_controller(const RobotState& s, const Vec2& goal,
                                 const RobotControlBounds& bounds) {
  require_finite(s.finite(), "robot state");
  require_finite(goal.allFinite(), "goal");

  constexpr double kLinearGain = 1.0;
  constexpr double kAngularGain = 2.0;

  const Vec2 d = goal - s.pos();
  const double dist = d.norm();
  if (dist < 1e-9) return {0.0, 0.0};

  const double bearing = wrap_angle(std::atan2(d.y(), d.x()) - s.heading);
  // Forward speed falls off as the goal moves off-axis; never reverse.
  const double v =
      std::clamp(kLinearGain * dist * std::cos(bearing), 0.0, bounds.v_max);
  const double w = std::clamp(kAngularGain * bearing, -bounds.omega_max,
                              bounds.omega_max);
  return {v, w};
}

HumanAction potential_field_human(const HumanState& s, const Vec2& goal,
                                  const RobotState& robot,
                                  const HumanControlBounds& bounds,
                                  const PotentialFieldGains& gains) {
  require_finite(s.finite(), "human state");
  require_finite(goal.allFinite(), "goal");
  require_finite(robot.finite(), "robot state");

  Vec2 a = gains.attract_p * (goal - s.pos()) - gains.attract_d * s.vel();

  if (gains.repulse > 0.0) {
    Vec2 away = s.pos() - robot.pos();
    const double d2 = away.squaredNorm();
    if (d2 < 1e-12) {
      // Coincident: push directly away from the goal.
      Vec2 back = s.pos() - goal;
      const double bn = back.norm();
      away = bn > 1e-9 ? Vec2(back / bn) : Vec2(1.0, 0.0);
      a += gains.repulse / gains.repulse_floor * away;
    } else {
      a += gains.repulse / std::max(d2, gains.repulse_floor) *
           (away / std::sqrt(d2));
    }
  }

  const double n = a.norm();
  if (n > bounds.accel_max) a *= bounds.accel_max / n;
  return {a.x(), a.y()};
}

RobotRolloutJacobian::RobotRolloutJacobian(const RobotTrajectory& xi) {
  n_ = xi.length();
  blocks_.resize(static_cast<size_t>(n_));
  // A_t = d step/d state, B_t = d step/d control, both at the recorded
  // (state, control) pair; chain forward: J(t, k) = A_t * J(t-1, k).
  for (int t = 1; t <= n_; ++t) {
    const double th = xi.state(t - 1).heading;
    const double v = xi.action(t).v;
    const double dt = xi.dt;
    Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    A(0, 2) = -v * std::sin(th) * dt;
    A(1, 2) = v * std::cos(th) * dt;
    Eigen::Matrix<double, 3, 2> B;
    B << std::cos(th) * dt, 0.0, std::sin(th) * dt, 0.0, 0.0, dt;

    auto& row = blocks_[static_cast<size_t>(t - 1)];
    row.resize(static_cast<size_t>(t));
    for (int k = 1; k < t; ++k)
      row[static_cast<size_t>(k - 1)] =
          A * blocks_[static_cast<size_t>(t - 2)][static_cast<size_t>(k - 1)];
    row[static_cast<size_t>(t - 1)] = B;
  }
}

VecX stack_controls(const HumanTrajectory& xi) {
  VecX u(2 * xi.length());
  for (int t = 1; t <= xi.length(); ++t) {
    u(2 * (t - 1)) = xi.action(t).ax;
    u(2 * (t - 1) + 1) = xi.action(t).ay;
  }
  return u;
}

VecX stack_controls(const RobotTrajectory& xi) {
  VecX u(2 * xi.length());
  for (int t = 1; t <= xi.length(); ++t) {
    u(2 * (t - 1)) = xi.action(t).v;
    u(2 * (t - 1) + 1) = xi.action(t).omega;
  }
  return u;
}

std::vector<HumanAction> unstack_human_controls(const VecX& u) {
  if (u.size() % 2 != 0)
    throw std::invalid_argument("stacked controls must have even length");
  std::vector<HumanAction> out(static_cast<size_t>(u.size() / 2));
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = {u(2 * static_cast<Eigen::Index>(k)),
              u(2 * static_cast<Eigen::Index>(k) + 1)};
  return out;
}

std::vector<RobotAction> unstack_robot_controls(const VecX& u) {
  if (u.size() % 2 != 0)
    throw std::invalid_argument("stacked controls must have even length");
  std::vector<RobotAction> out(static_cast<size_t>(u.size() / 2));
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = {u(2 * static_cast<Eigen::Index>(k)),
              u(2 * static_cast<Eigen::Index>(k) + 1)};
  return out;
}

}  // namespace socnav
