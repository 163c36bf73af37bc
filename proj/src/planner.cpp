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

#include "socnav/planner.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "socnav/laplace.hpp"

namespace socnav {

namespace {

constexpr double kGoalEps2 = 1e-18;  // softens goal distances at the root

double soft_norm(const Vec2& v) {
  return std::sqrt(v.squaredNorm() + kGoalEps2);
}

// Planner rollouts use wide limits so gradients differentiate the unclamped
// map; the projection keeps every accepted iterate feasible anyway.
RobotTrajectory rollout_wide(const RobotState& s0, const VecX& u, double dt) {
  return rollout_robot(s0, unstack_robot_controls(u), dt, {1e9, 1e9});
}

Projection control_box(const RobotControlBounds& b, int n) {
  VecX lo(2 * n), hi(2 * n);
  for (int t = 0; t < n; ++t) {
    lo(2 * t) = 0.0;
    hi(2 * t) = b.v_max;
    lo(2 * t + 1) = -b.omega_max;
    hi(2 * t + 1) = b.omega_max;
  }
  return box_projection(lo, hi);
}

// Goal-controller rollout under the true limits; init guess and fallback.
VecX goal_controller_controls(const RobotState& s0, const Vec2& goal, int n,
                              double dt, const RobotControlBounds& limits) {
  VecX u(2 * n);
  RobotState s = s0;
  for (int t = 0; t < n; ++t) {
    const RobotAction a = goto_goal_controller(s, goal, limits);
    u(2 * t) = a.v;
    u(2 * t + 1) = a.omega;
    s = step_robot(s, a, dt, limits);
  }
  return u;
}

// d reward / d (stacked human controls) with the robot path held fixed:
// comfort and safety are the only components that see the human.
VecX reward_partial_wrt_human(const RobotTrajectory& xi_r,
                              const HumanTrajectory& xi_h, const VecX& u_h,
                              const RobotRewardParams& p,
                              const Vec2& human_goal) {
  const int n = xi_r.length();
  const double dt = xi_r.dt;
  const double inv_d2 = 1.0 / (p.safety_scale * p.safety_scale);
  VecX g = VecX::Zero(2 * n);

  const Vec2 goal_err = xi_h.state(n).pos() - human_goal;
  const Vec2 goal_dir = goal_err / soft_norm(goal_err);
  for (int k = 1; k <= n; ++k) {
    Vec2 gk = -p.c_comfort * human_pos_coeff(n, k, dt) * goal_dir;
    for (int t = k; t <= n; ++t) {
      const Vec2 sep = xi_h.state(t).pos() - xi_r.state(t).pos();
      const double bell = std::exp(-sep.squaredNorm() * inv_d2);
      gk += p.c_safety * inv_d2 * bell * 2.0 * sep * human_pos_coeff(t, k, dt);
    }
    g.segment<2>(2 * (k - 1)) = gk;
  }
  g -= 2.0 * p.c_comfort * p.human_effort * u_h;
  return g;
}

}  // namespace

PlannerScene PlannerScene::from_config(const ScenarioConfig& cfg,
                                       const ModeWeights& weights) {
  PlannerScene s;
  s.robot_state = cfg.robot_start;
  s.human_state = HumanState{cfg.human_start.x(), cfg.human_start.y(), 0.0,
                             0.0};
  s.robot_goal = cfg.robot_goal;
  s.env = FeatureEnv::from_config(cfg);
  s.weights = weights;
  s.reward = cfg.reward;
  s.robot_limits = cfg.robot_limits;
  s.human_accel_max = cfg.human_limits.accel_max;
  s.dt = cfg.dt;
  s.horizon = cfg.horizon;
  s.decay = cfg.decay;
  return s;
}

double robot_reward(const RobotTrajectory& xi_r, const HumanTrajectory* xi_h,
                    CommAction comm, const RobotRewardParams& p,
                    const Vec2& robot_goal, const Vec2& human_goal) {
  const int n = xi_r.length();
  if (xi_h) {
    if (xi_h->length() != n)
      throw std::invalid_argument("trajectory lengths differ");
    if (std::abs(xi_h->dt - xi_r.dt) > 1e-12)
      throw std::invalid_argument("trajectory steps differ");
  }

  double effort_r = 0.0;
  for (int t = 1; t <= n; ++t) {
    const RobotAction& a = xi_r.action(t);
    effort_r += a.v * a.v + a.omega * a.omega;
  }
  const double efficiency = soft_norm(xi_r.state(n).pos() - robot_goal) +
                            p.robot_effort * effort_r;

  double comfort = 0.0;
  double safety = 0.0;
  if (xi_h) {
    double effort_h = 0.0;
    for (int t = 1; t <= n; ++t) {
      const HumanAction& a = xi_h->action(t);
      effort_h += a.ax * a.ax + a.ay * a.ay;
    }
    comfort = soft_norm(xi_h->state(n).pos() - human_goal) +
              p.human_effort * effort_h;
    const double inv_d2 = 1.0 / (p.safety_scale * p.safety_scale);
    for (int t = 1; t <= n; ++t) {
      safety += std::exp(
          -(xi_h->state(t).pos() - xi_r.state(t).pos()).squaredNorm() *
          inv_d2);
    }
  }

  const double comm_term = comm == CommAction::kNone ? 0.0 : p.comm_penalty;
  return -p.c_efficiency * efficiency - p.c_comfort * comfort -
         p.c_safety * safety + p.c_comm * comm_term;
}

IntentBelief candidate_belief(const IntentBelief& current, CommAction comm,
                              const DecayParams& decay) {
  if (comm == CommAction::kNone) return current;
  const Intent theta = comm_intent(comm);
  const double boost = decay.amplitude + 1.0;  // fresh signal, t = t_c
  const double eh = theta == Intent::kHumanPriority ? boost : 1.0;
  const double er = theta == Intent::kRobotPriority ? boost : 1.0;
  return combine_evidence(0.0, 0.0, eh, er, current);
}

double expected_reward(const VecX& u_r, CommAction comm,
                       const IntentBelief& belief, const PlannerScene& scene,
                       const AscentOptions& inner_opts, ResponseSet* detail,
                       const ResponseSet* warm) {
  if (!belief.valid()) throw std::invalid_argument("invalid belief");
  if (u_r.size() != 2 * scene.horizon)
    throw std::invalid_argument("control vector does not match horizon");

  const RobotTrajectory xi_r =
      rollout_wide(scene.robot_state, u_r, scene.dt);
  if (!scene.human_present) {
    return robot_reward(xi_r, nullptr, comm, scene.reward, scene.robot_goal,
                        scene.env.human_goal);
  }

  const IntentBelief b = candidate_belief(belief, comm, scene.decay);
  ResponseSet local;
  ResponseSet& out = detail ? *detail : local;
  double total = 0.0;
  for (const Intent theta :
       {Intent::kHumanPriority, Intent::kRobotPriority}) {
    const size_t i = static_cast<size_t>(theta);
    const VecX* seed =
        warm && warm->controls[i].size() == 2 * scene.horizon
            ? &warm->controls[i]
            : nullptr;
    out.trajectory[i] = most_likely_response(
        scene.weights.of(theta), scene.human_state, xi_r, scene.env,
        scene.human_accel_max, inner_opts, &out.status[i], seed);
    out.controls[i] = stack_controls(out.trajectory[i]);
    total += b.p(theta) * robot_reward(xi_r, &out.trajectory[i], comm,
                                       scene.reward, scene.robot_goal,
                                       scene.env.human_goal);
  }
  return total;
}

VecX grad_expected_reward(const VecX& u_r, CommAction comm,
                          const IntentBelief& belief,
                          const PlannerScene& scene, const ResponseSet& detail,
                          bool frozen_human, bool* regularized) {
  const int n = scene.horizon;
  const double dt = scene.dt;
  const RobotRewardParams& p = scene.reward;
  const RobotTrajectory xi_r = rollout_wide(scene.robot_state, u_r, dt);
  const RobotRolloutJacobian jac(xi_r);

  // Efficiency: identical under every mode, so it enters once.
  VecX g = -2.0 * p.c_efficiency * p.robot_effort * u_r;
  const Vec2 goal_err = xi_r.state(n).pos() - scene.robot_goal;
  const Vec2 goal_dir = goal_err / soft_norm(goal_err);
  for (int k = 1; k <= n; ++k)
    g.segment<2>(2 * (k - 1)) -=
        p.c_efficiency * jac.pos_block(n, k).transpose() * goal_dir;

  if (!scene.human_present) return g;

  const IntentBelief b = candidate_belief(belief, comm, scene.decay);
  const double inv_d2 = 1.0 / (p.safety_scale * p.safety_scale);
  for (const Intent theta :
       {Intent::kHumanPriority, Intent::kRobotPriority}) {
    const size_t i = static_cast<size_t>(theta);
    const double weight = b.p(theta);
    const HumanTrajectory& xi_h = detail.trajectory[i];
    if (xi_h.length() != n)
      throw std::invalid_argument("response does not match horizon");

    // Direct safety partial: the robot backing off raises the reward.
    for (int k = 1; k <= n; ++k) {
      Vec2 gk{0.0, 0.0};
      for (int t = k; t <= n; ++t) {
        const Vec2 sep = xi_r.state(t).pos() - xi_h.state(t).pos();
        const double bell = std::exp(-sep.squaredNorm() * inv_d2);
        gk += p.c_safety * inv_d2 * bell * 2.0 *
              (jac.pos_block(t, k).transpose() * sep);
      }
      g.segment<2>(2 * (k - 1)) += weight * gk;
    }

    if (frozen_human) continue;

    // Chain term through the human's argmax: the response shifts by
    // -[d²R_h/du_h²]^{-1} d²R_h/du_h du_r per unit of robot control.
    const VecX dr_duh = reward_partial_wrt_human(
        xi_r, xi_h, detail.controls[i], p, scene.env.human_goal);
    MatX hess = hessian_human_reward(scene.weights.of(theta), xi_h, xi_r,
                                     scene.env);
    const bool shifted = clamp_negative_definite(hess, 1e-9);
    if (shifted && regularized) *regularized = true;
    const MatX mixed = mixed_hessian_human_reward(scene.weights.of(theta),
                                                  xi_h, xi_r, scene.env);
    const VecX y = hess.ldlt().solve(dr_duh);
    g -= weight * (mixed.transpose() * y);
  }
  return g;
}

namespace {

struct CandidateSolution {
  CommAction comm = CommAction::kNone;
  AscentResult result;
  ResponseSet detail;
  IntentBelief belief_used;
};

CandidateSolution solve_candidate(CommAction comm, const VecX& init,
                                  const Projection& project,
                                  const IntentBelief& belief,
                                  const PlannerScene& scene,
                                  const PlannerOptions& opts) {
  CandidateSolution cand;
  cand.comm = comm;
  cand.belief_used = candidate_belief(belief, comm, scene.decay);

  // Objective/gradient share one evaluation cache; the inner response
  // solves warm-start from the previous outer evaluation.
  ResponseSet warm;
  bool have_warm = false;
  VecX cached_at;
  ResponseSet cached;
  const Objective objective = [&](const VecX& u) {
    ResponseSet d;
    const double value =
        expected_reward(u, comm, belief, scene, opts.inner, &d,
                        have_warm ? &warm : nullptr);
    warm = d;
    have_warm = true;
    cached_at = u;
    cached = d;
    return value;
  };
  const GradientFn gradient = [&](const VecX& u) {
    if (cached_at.size() != u.size() ||
        (cached_at.array() != u.array()).any()) {
      objective(u);
    }
    return grad_expected_reward(u, comm, belief, scene, cached);
  };

  cand.result = maximize(objective, gradient, project(init), opts.outer,
                         project);
  // The cache may hold a rejected line-search probe; refresh at the argmax.
  cand.result.value = expected_reward(cand.result.x, comm, belief, scene,
                                      opts.inner, &cand.detail,
                                      have_warm ? &warm : nullptr);
  return cand;
}

}  // namespace

Plan plan_step(const PlannerScene& scene_now, const PlanRequest& request,
               const PlannerOptions& opts) {
  if (!request.belief.valid())
    throw std::invalid_argument("invalid belief");
  PlannerScene scene = scene_now;
  const int n = scene.horizon;

  if (request.compensate_latency) {
    // The previous plan's first control is executing while this runs; the
    // human is projected at constant velocity.
    const RobotAction in_flight =
        request.previous && !request.previous->controls.empty()
            ? request.previous->controls.front()
            : RobotAction{0.0, 0.0};
    scene.robot_state = step_robot(scene.robot_state, in_flight, scene.dt,
                                   scene.robot_limits);
    if (scene.human_present)
      scene.human_state =
          step_human(scene.human_state, HumanAction{0.0, 0.0}, scene.dt);
  }

  VecX init;
  if (request.previous &&
      static_cast<int>(request.previous->controls.size()) == n) {
    init.resize(2 * n);
    for (int t = 0; t < n; ++t) {
      const RobotAction& a =
          request.previous->controls[static_cast<size_t>(
              std::min(t + 1, n - 1))];
      init(2 * t) = a.v;
      init(2 * t + 1) = a.omega;
    }
  } else {
    init = goal_controller_controls(scene.robot_state, scene.robot_goal, n,
                                    scene.dt, scene.robot_limits);
  }
  const Projection project = control_box(scene.robot_limits, n);

  const CandidateSolution* best = nullptr;
  std::array<CandidateSolution, 3> candidates;
  int count = 0;
  for (const CommAction comm :
       {CommAction::kNone, CommAction::kHumanPriority,
        CommAction::kRobotPriority}) {
    if (comm != CommAction::kNone && !request.allow_comm) continue;
    candidates[static_cast<size_t>(count)] =
        solve_candidate(comm, init, project, request.belief, scene, opts);
    const CandidateSolution& cand = candidates[static_cast<size_t>(count)];
    ++count;
    if (!std::isfinite(cand.result.value)) continue;
    if (!best || cand.result.value > best->result.value + opts.tie_epsilon)
      best = &cand;
  }

  Plan plan;
  if (!best) {
    plan.controls = unstack_robot_controls(goal_controller_controls(
        scene.robot_state, scene.robot_goal, n, scene.dt,
        scene.robot_limits));
    plan.comm = CommAction::kNone;
    plan.belief_used = request.belief;
    plan.fallback = true;
    return plan;
  }

  plan.controls = unstack_robot_controls(best->result.x);
  plan.comm = best->comm;
  plan.expected_reward = best->result.value;
  plan.responses = best->detail;
  plan.belief_used = best->belief_used;
  plan.iterations = best->result.iterations;
  plan.grad_norm = best->result.grad_norm;
  plan.converged = best->result.converged;
  return plan;
}

Plan baseline_plan(const PlannerScene& scene, const PlannerOptions& opts) {
  const int n = scene.horizon;
  const double dt = scene.dt;
  const RobotRewardParams& p = scene.reward;
  const VecX seed = goal_controller_controls(
      scene.robot_state, scene.robot_goal, n, dt, scene.robot_limits);

  Plan plan;
  plan.comm = CommAction::kNone;
  plan.belief_used = IntentBelief{0.5};

  if (!scene.human_present) {
    plan.controls = unstack_robot_controls(seed);
    plan.expected_reward =
        robot_reward(rollout_wide(scene.robot_state, seed, dt), nullptr,
                     CommAction::kNone, p, scene.robot_goal,
                     scene.env.human_goal);
    plan.converged = true;
    return plan;
  }

  // The human's current position is treated as a static obstacle; no
  // prediction, no belief, no signalling.
  const Vec2 pinned = scene.human_state.pos();
  const double inv_d2 = 1.0 / (p.safety_scale * p.safety_scale);
  const Objective objective = [&](const VecX& u) {
    const RobotTrajectory xi_r = rollout_wide(scene.robot_state, u, dt);
    double effort = 0.0;
    double bells = 0.0;
    for (int t = 1; t <= n; ++t) {
      effort += u.segment<2>(2 * (t - 1)).squaredNorm();
      bells +=
          std::exp(-(xi_r.state(t).pos() - pinned).squaredNorm() * inv_d2);
    }
    return -p.c_efficiency *
               (soft_norm(xi_r.state(n).pos() - scene.robot_goal) +
                p.robot_effort * effort) -
           p.c_safety * bells;
  };
  const GradientFn gradient = [&](const VecX& u) {
    const RobotTrajectory xi_r = rollout_wide(scene.robot_state, u, dt);
    const RobotRolloutJacobian jac(xi_r);
    VecX g = -2.0 * p.c_efficiency * p.robot_effort * u;
    const Vec2 goal_err = xi_r.state(n).pos() - scene.robot_goal;
    const Vec2 goal_dir = goal_err / soft_norm(goal_err);
    for (int k = 1; k <= n; ++k) {
      Vec2 gk = -p.c_efficiency * jac.pos_block(n, k).transpose() * goal_dir;
      for (int t = k; t <= n; ++t) {
        const Vec2 sep = xi_r.state(t).pos() - pinned;
        const double bell = std::exp(-sep.squaredNorm() * inv_d2);
        gk += p.c_safety * inv_d2 * bell * 2.0 *
              (jac.pos_block(t, k).transpose() * sep);
      }
      g.segment<2>(2 * (k - 1)) += gk;
    }
    return g;
  };

  const Projection project = control_box(scene.robot_limits, n);
  const AscentResult res =
      maximize(objective, gradient, project(seed), opts.outer, project);
  plan.controls = unstack_robot_controls(res.x);
  plan.expected_reward = res.value;
  plan.iterations = res.iterations;
  plan.grad_norm = res.grad_norm;
  plan.converged = res.converged;
  return plan;
}

}  // namespace socnav
