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

#ifndef SOCNAV_DYNAMICS_H_
#define SOCNAV_DYNAMICS_H_

#include <utility>
#include <vector>

#include "socnav/types.hpp"

namespace socnav {

struct HumanControlBounds {
  double accel_max = 1.5;  // m/s^2
  double speed_max = 2.0;  // m/s
};

struct RobotControlBounds {
  double v_max = 0.7;      // m/s, v in [0, v_max]
  double omega_max = 1.5;  // rad/s
};

/// Normalizes an angle to (-pi, pi].
double wrap_angle(double a);

/// Constant-acceleration update over one step. The acceleration is clamped
/// to the admissible magnitude and the resulting speed to the human's max
/// speed; `clamped` (optional) reports whether either limit was active.
/// Throws std::invalid_argument on non-finite inputs or dt <= 0.
HumanState step_human(const HumanState& s, const HumanAction& u, double dt,
                      const HumanControlBounds& bounds = {},
                      bool* clamped = nullptr);

/// Differential-drive kinematic update; position advances along the pre-step
/// heading. Out-of-bound controls are clamped and flagged.
RobotState step_robot(const RobotState& s, const RobotAction& u, double dt,
                      const RobotControlBounds& bounds = {},
                      bool* clamped = nullptr);

/// Fixed-timestep state-action sequence for one agent. `start` is the state
/// before the first action; steps[k] holds the state reached by applying
/// steps[k].second.
struct HumanTrajectory {
  double dt = 0.5;
  HumanState start;
  std::vector<std::pair<HumanState, HumanAction>> steps;

  int length() const { return static_cast<int>(steps.size()); }
  /// State at step t, t in [0, length()]; t = 0 is the start state.
  const HumanState& state(int t) const {
    return t == 0 ? start : steps[static_cast<size_t>(t) - 1].first;
  }
  /// Action applied between state(t-1) and state(t), t in [1, length()].
  const HumanAction& action(int t) const {
    return steps[static_cast<size_t>(t) - 1].second;
  }
};

struct RobotTrajectory {
  double dt = 0.5;
  RobotState start;
  std::vector<std::pair<RobotState, RobotAction>> steps;

  int length() const { return static_cast<int>(steps.size()); }
  const RobotState& state(int t) const {
    return t == 0 ? start : steps[static_cast<size_t>(t) - 1].first;
  }
  const RobotAction& action(int t) const {
    return steps[static_cast<size_t>(t) - 1].second;
  }
};

/// Applies a control sequence from s0. Throws on empty controls.
HumanTrajectory rollout_human(const HumanState& s0,
                              const std::vector<HumanAction>& controls,
                              double dt, const HumanControlBounds& bounds = {},
                              bool* clamped = nullptr);

RobotTrajectory rollout_robot(const RobotState& s0,
                              const std::vector<RobotAction>& controls,
                              double dt, const RobotControlBounds& bounds = {},
                              bool* clamped = nullptr);

/// Max consistency violation between recorded states and re-stepping each
/// recorded action (0 for trajectories built by rollout).
double trajectory_consistency_error(const HumanTrajectory& xi,
                                    const HumanControlBounds& bounds = {});
double trajectory_consistency_error(const RobotTrajectory& xi,
                                    const RobotControlBounds& bounds = {});

/// Feedback policy steering the robot to a goal position; saturates at the
/// control bounds and slows to zero at the goal.
RobotAction goto_goal_controller(const RobotState& s, const Vec2& goal,
                                 const RobotControlBounds& bounds = {});

struct PotentialFieldGains {
  double attract_p = 1.0;
  double attract_d = 1.4;
  double repulse = 2.0;
  double repulse_floor = 0.25;  // lower clamp on squared distance
};

/// Goal-attracting / robot-repelling acceleration policy, clamped to the
/// human control bounds. With the human and robot coincident the repulsion
/// points away from the goal at full magnitude.
HumanAction potential_field_human(const HumanState& s, const Vec2& goal,
                                  const RobotState& robot,
                                  const HumanControlBounds& bounds = {},
                                  const PotentialFieldGains& gains = {});

// ---------------------------------------------------------------------------
// Derivatives of rollouts with respect to stacked controls.
//
// Stacked layouts: human controls [ax1, ay1, ..., axN, ayN], robot controls
// [v1, w1, ..., vN, wN]. The human map assumes the unclamped
// constant-acceleration regime (the maps below are what the optimizers and
// the IRL likelihood differentiate through).
// ---------------------------------------------------------------------------

/// d(position at step t) / d(control at step k), scalar multiple of I2.
inline double human_pos_coeff(int t, int k, double dt) {
  return k <= t ? dt * dt * (static_cast<double>(t - k) + 0.5) : 0.0;
}

/// d(velocity at step t) / d(control at step k), scalar multiple of I2.
inline double human_vel_coeff(int t, int k, double dt) {
  return k <= t ? dt : 0.0;
}

/// Forward-accumulated Jacobians of a robot rollout: block(t, k) is the 3x2
/// matrix d(state at step t)/d(control at step k), for 1 <= k <= t <= N.
class RobotRolloutJacobian {
 public:
  explicit RobotRolloutJacobian(const RobotTrajectory& xi);

  int horizon() const { return n_; }
  const Eigen::Matrix<double, 3, 2>& block(int t, int k) const {
    return blocks_[static_cast<size_t>(t - 1)][static_cast<size_t>(k - 1)];
  }
  /// Top two rows of block(t, k): d(position)/d(control).
  Eigen::Matrix<double, 2, 2> pos_block(int t, int k) const {
    return block(t, k).topRows<2>();
  }

 private:
  int n_ = 0;
  std::vector<std::vector<Eigen::Matrix<double, 3, 2>>> blocks_;
};

VecX stack_controls(const HumanTrajectory& xi);
VecX stack_controls(const RobotTrajectory& xi);
std::vector<HumanAction> unstack_human_controls(const VecX& u);
std::vector<RobotAction> unstack_robot_controls(const VecX& u);

}  // namespace socnav

#endif  // SOCNAV_DYNAMICS_H_
