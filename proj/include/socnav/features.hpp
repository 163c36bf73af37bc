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

#ifndef SOCNAV_FEATURES_H_
#define SOCNAV_FEATURES_H_

#include <array>
#include <vector>

#include "socnav/config.hpp"
#include "socnav/dynamics.hpp"
#include "socnav/types.hpp"

namespace socnav {

inline constexpr int kNumFeatures = 6;

enum FeatureIndex {
  kFeatVelocity = 0,     // Σ ||v_t||^2
  kFeatAcceleration = 1, // Σ ||u_t||^2
  kFeatGoal = 2,         // ||x_N - goal||
  kFeatObstacle = 3,     // Σ exp(-dist_to_nearest_obstacle^2 / D_o^2)
  kFeatAvoidance = 4,    // Σ exp(-||x_h - x_r||^2 / D_r^2)
  kFeatFront = 5,        // Σ exp(-(x_h - x_front)^T D_f^-1 (x_h - x_front))
};

using FeatureVec = Eigen::Matrix<double, kNumFeatures, 1>;

struct FeatureEnv {
  Vec2 human_goal{0.0, 0.0};
  std::vector<Obstacle> obstacles;
  FeatureScales scales;

  static FeatureEnv from_config(const ScenarioConfig& cfg) {
    return {cfg.human_goal, cfg.obstacles, cfg.features};
  }
};

/// Evaluates all six navigation features on aligned trajectories (states at
/// steps 1..N for both agents). Throws on length or dt mismatch.
FeatureVec eval_features(const HumanTrajectory& xi_h,
                         const RobotTrajectory& xi_r, const FeatureEnv& env);

// ---------------------------------------------------------------------------
// Derivatives with respect to the stacked human control vector
// u = [a_1x, a_1y, ..., a_Nx, a_Ny].
//
// These differentiate the unclamped constant-acceleration model: human states
// are rebuilt from (xi_h.start, recorded controls) through the linear maps,
// so on clamp-free trajectories they are exact derivatives of eval_features
// composed with the rollout.
// ---------------------------------------------------------------------------

std::array<VecX, kNumFeatures> grad_features_wrt_human_controls(
    const HumanTrajectory& xi_h, const RobotTrajectory& xi_r,
    const FeatureEnv& env);

std::array<MatX, kNumFeatures> hessian_features_wrt_human_controls(
    const HumanTrajectory& xi_h, const RobotTrajectory& xi_r,
    const FeatureEnv& env);

/// Reward-level wrappers for R = w · f.
double human_reward(const FeatureVec& w, const HumanTrajectory& xi_h,
                    const RobotTrajectory& xi_r, const FeatureEnv& env);
VecX grad_human_reward(const FeatureVec& w, const HumanTrajectory& xi_h,
                       const RobotTrajectory& xi_r, const FeatureEnv& env);
MatX hessian_human_reward(const FeatureVec& w, const HumanTrajectory& xi_h,
                          const RobotTrajectory& xi_r, const FeatureEnv& env);

/// Cross second derivative ∂²(w·f)/∂u_h ∂u_r of the human reward: rows index
/// stacked human controls, columns stacked robot controls [v_1, ω_1, ...].
/// Only the robot-proximity and front-of-robot features contribute; the robot
/// side chains through the unicycle rollout Jacobian of xi_r.
MatX mixed_hessian_human_reward(const FeatureVec& w,
                                const HumanTrajectory& xi_h,
                                const RobotTrajectory& xi_r,
                                const FeatureEnv& env);

// ---------------------------------------------------------------------------
// Priority-conditioned motion rewards over a trailing history window, used
// by the intent model. Robot velocity comes from finite differences of
// consecutive robot positions; the human's from its state.
// ---------------------------------------------------------------------------

/// Human priority: per step, the rate of robot-human separation change
/// projected on the line between them, divided by max(distance², 1) — the
/// robot is expected to not advance on the human. Robot priority: per step,
/// −|speed − desired_speed| / max(distance², 1) — the robot is expected to
/// keep cruising. Sums over every step of the window. Throws unless both
/// windows have the same dt and at least one step (two states).
double expected_robot_reward(Intent theta, const RobotTrajectory& xi_r,
                             const HumanTrajectory& xi_h,
                             const FeatureScales& scales);

}  // namespace socnav

#endif  // SOCNAV_FEATURES_H_
