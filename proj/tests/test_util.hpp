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

#ifndef SOCNAV_TESTS_TEST_UTIL_H_
#define SOCNAV_TESTS_TEST_UTIL_H_

#include <functional>
#include <random>

#include <Eigen/Cholesky>

#include "socnav/dynamics.hpp"
#include "socnav/features.hpp"
#include "socnav/irl.hpp"
#include "socnav/laplace.hpp"
#include "socnav/optim.hpp"
#include "socnav/types.hpp"

namespace socnav::testing {

// Wide limits so rollouts in derivative tests never clamp and therefore
// match the differentiable (unclamped) model exactly.
inline HumanControlBounds wide_human_bounds() { return {1e9, 1e9}; }
inline RobotControlBounds wide_robot_bounds() { return {1e9, 1e9}; }

inline VecX fd_gradient(const std::function<double(const VecX&)>& f,
                        const VecX& x, double h = 1e-5) {
  VecX g(x.size());
  VecX xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline MatX fd_jacobian(const std::function<VecX(const VecX&)>& g,
                        const VecX& x, double h = 1e-5) {
  VecX xp = x;
  xp(0) = x(0) + h;
  const Eigen::Index rows = g(xp).size();
  xp(0) = x(0);
  MatX j(rows, x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const VecX gp = g(xp);
    xp(i) = x(i) - h;
    const VecX gm = g(xp);
    xp(i) = x(i);
    j.col(i) = (gp - gm) / (2.0 * h);
  }
  return j;
}

// Max-norm relative error with an absolute floor for near-zero references.
inline double relative_error(const MatX& got, const MatX& want,
                             double floor = 1e-6) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), floor);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

inline double relative_error(const VecX& got, const VecX& want,
                             double floor = 1e-6) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), floor);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

struct RandomScene {
  HumanTrajectory xi_h;
  RobotTrajectory xi_r;
  FeatureEnv env;
};

inline RandomScene random_scene(std::mt19937_64& rng, int n = 6,
                                bool with_obstacle = true) {
  std::uniform_real_distribution<double> ux(0.0, 8.0), uy(0.0, 10.0),
      uv(-1.0, 1.0), ua(-1.0, 1.0), uth(-M_PI, M_PI), uspeed(0.1, 0.6),
      uw(-1.0, 1.0), urad(0.0, 0.5);
  const double dt = 0.5;

  HumanState h0{ux(rng), uy(rng), uv(rng), uv(rng)};
  std::vector<HumanAction> hu(static_cast<size_t>(n));
  for (auto& a : hu) a = {ua(rng), ua(rng)};

  RobotState r0{ux(rng), uy(rng), uth(rng)};
  std::vector<RobotAction> ru(static_cast<size_t>(n));
  for (auto& a : ru) a = {uspeed(rng), uw(rng)};

  RandomScene s;
  s.xi_h = rollout_human(h0, hu, dt, wide_human_bounds());
  s.xi_r = rollout_robot(r0, ru, dt, wide_robot_bounds());
  s.env.human_goal = Vec2(ux(rng), uy(rng));
  if (with_obstacle)
    s.env.obstacles.push_back({Vec2(ux(rng), uy(rng)), urad(rng)});
  return s;
}

// Rebuilds the human trajectory from stacked controls (unclamped); the
// finite-difference seam used by every derivative oracle.
inline HumanTrajectory rebuild_human(const HumanState& s0, const VecX& u,
                                     double dt) {
  return rollout_human(s0, unstack_human_controls(u), dt, wide_human_bounds());
}

inline RobotTrajectory stationary_robot(const Vec2& pos, double heading, int n,
                                        double dt = 0.5) {
  RobotTrajectory xi;
  xi.dt = dt;
  xi.start = {pos.x(), pos.y(), heading};
  for (int t = 0; t < n; ++t)
    xi.steps.emplace_back(xi.start, RobotAction{0.0, 0.0});
  return xi;
}

inline RobotTrajectory straight_robot(const RobotState& s0, double v, int n,
                                      double dt = 0.5) {
  return rollout_robot(s0, std::vector<RobotAction>(static_cast<size_t>(n),
                                                    RobotAction{v, 0.0}),
                       dt, wide_robot_bounds());
}

// One horizon window of synthetic pedestrian data: the human walks roughly
// +y toward a goal while the robot crosses near its path, so the social
// features carry signal. Controls are drawn from the reward model's own
// local Gaussian — most likely response u* plus sqrt(T)·(−H(u*))^{-1/2}
// noise — then re-clamped to the acceleration ball. Temperature T = 1 is an
// exact draw from the second-order trajectory distribution, the regime where
// maximum-likelihood weight recovery is consistent.
inline Demonstration synthetic_window(std::mt19937_64& rng,
                                      const FeatureVec& w_gen,
                                      const FeatureScales& scales,
                                      Intent label, double temperature = 1.0,
                                      bool with_obstacle = false, int n = 6,
                                      double dt = 0.5) {
  std::uniform_real_distribution<double> hx(1.5, 6.5), hy(0.5, 3.0),
      lateral(-1.2, 1.2), ahead(1.2, 3.0), rx_off(-2.0, 2.0), rv(0.25, 0.6),
      rw(-0.3, 0.3), obs_side(0.5, 1.1), obs_r(0.2, 0.4), coin(0.0, 1.0);
  std::normal_distribution<double> vjit(0.0, 0.4), unit(0.0, 1.0);

  HumanState h0{hx(rng), hy(rng), 0.4 * vjit(rng), 1.0 + vjit(rng)};
  FeatureEnv env;
  env.scales = scales;
  env.human_goal = Vec2(h0.x + lateral(rng), h0.y + 6.0);

  // Robot ahead of the human, driving back across its path.
  const double rxo = rx_off(rng);
  RobotState r0{h0.x + rxo, h0.y + ahead(rng),
                (rxo >= 0.0 ? M_PI : 0.0) + rw(rng)};
  std::vector<RobotAction> ru(static_cast<size_t>(n));
  for (auto& a : ru) a = {rv(rng), rw(rng)};
  const RobotTrajectory xi_r = rollout_robot(r0, ru, dt, wide_robot_bounds());

  if (with_obstacle) {
    const Vec2 mid = 0.5 * (h0.pos() + env.human_goal);
    const double side = coin(rng) < 0.5 ? -1.0 : 1.0;
    env.obstacles.push_back(
        {mid + Vec2(side * obs_side(rng), 0.0), obs_r(rng)});
  }

  AscentOptions opts;
  opts.max_iterations = 600;
  opts.grad_tolerance = 1e-8;
  const HumanTrajectory resp =
      most_likely_response(w_gen, h0, xi_r, env, 1.5, opts);

  MatX hess = hessian_human_reward(w_gen, resp, xi_r, env);
  clamp_negative_definite(hess, 1e-3);
  const Eigen::LLT<MatX> neg(MatX(-hess));  // -H = L Lᵀ, covariance (LLᵀ)⁻¹

  VecX z(2 * n);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = unit(rng);
  VecX u = stack_controls(resp) +
           std::sqrt(temperature) *
               neg.matrixU().solve(z);  // L⁻ᵀ z ~ N(0, (−H)⁻¹)
  u = block_ball_projection(2, 1.5)(u);

  return {rebuild_human(h0, u, dt), xi_r, env, label};
}

inline RobotTrajectory rebuild_robot(const RobotState& s0, const VecX& u,
                                     double dt) {
  return rollout_robot(s0, unstack_robot_controls(u), dt, wide_robot_bounds());
}

}  // namespace socnav::testing

#endif  // SOCNAV_TESTS_TEST_UTIL_H_
