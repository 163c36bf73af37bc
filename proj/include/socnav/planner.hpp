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

#ifndef SOCNAV_PLANNER_H_
#define SOCNAV_PLANNER_H_

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "socnav/config.hpp"
#include "socnav/dynamics.hpp"
#include "socnav/features.hpp"
#include "socnav/intent.hpp"
#include "socnav/irl.hpp"
#include "socnav/optim.hpp"
#include "socnav/types.hpp"

namespace socnav {

/// Everything the planner reads at one tick: agent states at the start of
/// the horizon, goals, the trained human model, and reward/limit parameters.
struct PlannerScene {
  RobotState robot_state{0.0, 0.0, 0.0};
  HumanState human_state{0.0, 0.0, 0.0, 0.0};
  bool human_present = true;

  Vec2 robot_goal{0.0, 0.0};
  FeatureEnv env;       // human goal, obstacles, feature scales
  ModeWeights weights;  // human reward weights per intent

  RobotRewardParams reward;
  RobotControlBounds robot_limits;
  double human_accel_max = 1.5;
  double dt = 0.5;
  int horizon = 6;
  DecayParams decay;

  static PlannerScene from_config(const ScenarioConfig& cfg,
                                  const ModeWeights& weights);
};

/// Reward of one concrete joint rollout: negated goal-distance/effort sums
/// for both agents, a Gaussian collision penalty per step, and a flat charge
/// for emitting a signal. `xi_h` may be null (no human in the scene); the
/// comfort and safety components then vanish.
double robot_reward(const RobotTrajectory& xi_r, const HumanTrajectory* xi_h,
                    CommAction comm, const RobotRewardParams& params,
                    const Vec2& robot_goal, const Vec2& human_goal);

/// Belief a candidate announcement is scored against: the posterior as if
/// that signal fired right now (flat evidence for kNone).
IntentBelief candidate_belief(const IntentBelief& current, CommAction comm,
                              const DecayParams& decay);

/// Per-mode human best responses backing one expected-reward evaluation.
struct ResponseSet {
  std::array<HumanTrajectory, 2> trajectory;  // indexed by Intent
  std::array<VecX, 2> controls;
  std::array<ResponseStatus, 2> status;

  const HumanTrajectory& of(Intent theta) const {
    return trajectory[static_cast<size_t>(theta)];
  }
};

/// Belief-weighted reward over the per-intent most likely human responses to
/// the rollout of `u_r` (stacked [v1, w1, ...] from scene.robot_state).
/// Re-solves the inner response argmax; pass `warm` to seed those solves and
/// `detail` to retrieve them. With no human present this is the plain robot
/// reward and `detail` is left empty.
double expected_reward(const VecX& u_r, CommAction comm,
                       const IntentBelief& belief, const PlannerScene& scene,
                       const AscentOptions& inner_opts = {},
                       ResponseSet* detail = nullptr,
                       const ResponseSet* warm = nullptr);

/// Total derivative of expected_reward at `u_r` given the responses solved
/// there: the direct partial plus, per mode, the chain term through the
/// human's argmax (curvature solve against the mixed reward Hessian). Set
/// `frozen_human` to drop the chain term (ablation / diagnostics). A
/// near-singular inner curvature is eigenvalue-shifted and flagged.
VecX grad_expected_reward(const VecX& u_r, CommAction comm,
                          const IntentBelief& belief,
                          const PlannerScene& scene, const ResponseSet& detail,
                          bool frozen_human = false,
                          bool* regularized = nullptr);

struct PlannerOptions {
  AscentOptions outer{50, 1e-4, 0.5, 2.0, 0.5, 1e-4, 30};
  AscentOptions inner{300, 1e-6, 1.0, 4.0, 0.5, 1e-4, 40};
  double tie_epsilon = 1e-9;  // signal ranking: none > human > robot on ties
};

struct Plan {
  std::vector<RobotAction> controls;  // horizon N, executable from tick start
  CommAction comm = CommAction::kNone;
  double expected_reward = -std::numeric_limits<double>::infinity();
  ResponseSet responses;        // human predictions under the chosen signal
  IntentBelief belief_used;     // posterior the chosen signal was scored with
  int iterations = 0;           // outer ascent iterations, chosen candidate
  double grad_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool fallback = false;  // optimization unusable, goal controller substituted
};

struct PlanRequest {
  IntentBelief belief;            // human's intent belief as measured now
  const Plan* previous = nullptr; // warm start + the control in flight
  bool compensate_latency = true; // advance both agents one tick first
  bool allow_comm = true;         // false restricts the signal set to {none}
};

/// One MPC tick: predicts one step ahead (the previous plan's first control
/// is in flight while this runs), then solves one projected ascent per
/// candidate signal in {none, human-priority, robot-priority} and returns
/// the argmax. Ties within tie_epsilon prefer silence, then human priority.
Plan plan_step(const PlannerScene& scene, const PlanRequest& request,
               const PlannerOptions& opts = {});

/// Reactive comparison planner: steers to the goal while avoiding the
/// human's current position as a static obstacle. Never signals and ignores
/// any belief. With no human present, returns the goal controller's rollout.
Plan baseline_plan(const PlannerScene& scene, const PlannerOptions& opts = {});

}  // namespace socnav

#endif  // SOCNAV_PLANNER_H_
