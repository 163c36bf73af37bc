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

#include "socnav/intent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "socnav/features.hpp"
#include "socnav/laplace.hpp"

namespace socnav {

namespace {

// Smoothing constants for the motion functional. The speed epsilon rounds the
// norm kink at zero velocity; the position epsilon keeps the unit vector
// defined at contact; the damp sharpness trades smoothness against fidelity
// to the max(d², 1) distance damping.
constexpr double kSpeedEps = 0.05;
constexpr double kPosEps = 1e-12;
constexpr double kDampSharpness = 8.0;

// Smooth stand-in for max(s, 1): 1 + softplus(s - 1).
double damp(double s) {
  const double z = kDampSharpness * (s - 1.0);
  if (z > 30.0) return s;
  if (z < -30.0) return 1.0;
  return 1.0 + std::log1p(std::exp(z)) / kDampSharpness;
}

double damp_deriv(double s) {
  const double z = kDampSharpness * (s - 1.0);
  if (z > 30.0) return 1.0;
  if (z < -30.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-z));
}

// The normalizer integrates over feasible robot velocities, not all of R^2L:
// the separation-rate reward grows linearly in speed, so without a domain
// edge its maximization diverges along super-physical motions. A cubic hinge
// is C², vanishes identically below the limit (physical motions are scored
// untouched), and outgrows the linear reward beyond it.
constexpr double kBarrierGain = 20.0;

double barrier(double speed, double limit) {
  const double z = speed - limit;
  return z > 0.0 ? -kBarrierGain * z * z * z : 0.0;
}

double barrier_deriv(double speed, double limit) {
  const double z = speed - limit;
  return z > 0.0 ? -3.0 * kBarrierGain * z * z : 0.0;
}

struct Window {
  double dt = 0.0;
  Vec2 anchor;                 // robot position at the window start
  std::vector<Vec2> human_pos;  // steps 1..L
  std::vector<Vec2> human_vel;
  VecX w_observed;             // stacked FD velocities of the recorded robot
};

Window make_window(const RobotTrajectory& xi_r, const HumanTrajectory& xi_h) {
  if (xi_r.length() != xi_h.length())
    throw std::invalid_argument("history windows must align");
  if (xi_r.length() < 1)
    throw std::invalid_argument("history must contain at least two states");
  if (std::abs(xi_r.dt - xi_h.dt) > 1e-12)
    throw std::invalid_argument("history windows must share dt");

  Window w;
  w.dt = xi_r.dt;
  w.anchor = xi_r.state(0).pos();
  const int n = xi_r.length();
  w.human_pos.reserve(static_cast<size_t>(n));
  w.human_vel.reserve(static_cast<size_t>(n));
  w.w_observed.resize(2 * n);
  for (int t = 1; t <= n; ++t) {
    w.human_pos.push_back(xi_h.state(t).pos());
    w.human_vel.push_back(xi_h.state(t).vel());
    const Vec2 v =
        (xi_r.state(t).pos() - xi_r.state(t - 1).pos()) / w.dt;
    w.w_observed.segment<2>(2 * (t - 1)) = v;
  }
  return w;
}

// Trailing `window` steps of a trajectory (all of it when shorter).
template <typename Traj>
Traj tail(const Traj& xi, int window) {
  const int n = xi.length();
  const int keep = std::min(n, std::max(window, 1));
  Traj out;
  out.dt = xi.dt;
  out.start = xi.state(n - keep);
  out.steps.assign(xi.steps.end() - keep, xi.steps.end());
  return out;
}

// Central finite differences of an analytic gradient; symmetrized. Exact for
// quadratics, second-order accurate otherwise.
MatX fd_hessian(const GradientFn& grad, const VecX& x, double h = 1e-5) {
  const Eigen::Index n = x.size();
  MatX hess(n, n);
  VecX xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp(i) = x(i) + h;
    const VecX gp = grad(xp);
    xp(i) = x(i) - h;
    const VecX gm = grad(xp);
    xp(i) = x(i);
    hess.col(i) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

ImplicitEvidence normalize_by_laplace(const Objective& reward,
                                      const GradientFn& grad,
                                      double log_numerator, const VecX& w_init,
                                      double min_curvature) {
  AscentOptions opts;
  opts.max_iterations = 200;
  opts.grad_tolerance = 1e-7;
  const AscentResult res = maximize(reward, grad, w_init, opts);

  ImplicitEvidence ev;
  const double log_z = laplace_log_integral(
      res.value, fd_hessian(grad, res.x), min_curvature, &ev.regularized);
  ev.log_likelihood = log_numerator - log_z;
  return ev;
}

}  // namespace

ModeDistribution behavior_mode_distribution(const IntentBelief& belief) {
  if (!belief.valid()) throw std::invalid_argument("invalid intent belief");
  return {belief.p_human_priority};
}

double explicit_likelihood(const std::optional<CommEvent>& comm, Intent theta,
                           double t, const DecayParams& params) {
  if (!(params.amplitude > 0.0) || !(params.time_constant > 0.0))
    throw std::invalid_argument("decay parameters must be positive");
  if (!comm) return 1.0;
  if (t < comm->t_c)
    throw std::invalid_argument("query time precedes the communication");
  if (comm->message != theta) return 1.0;
  return params.amplitude *
             std::exp(-(t - comm->t_c) / params.time_constant) +
         1.0;
}

MotionFunctional motion_reward_functional(Intent theta,
                                          const RobotTrajectory& xi_r_hist,
                                          const HumanTrajectory& xi_h_hist,
                                          const FeatureScales& scales,
                                          const IntentParams& params) {
  const Window win = make_window(xi_r_hist, xi_h_hist);
  const int n = static_cast<int>(win.human_pos.size());
  const double dt = win.dt;
  const double v_d = scales.desired_speed;
  const double abs_eps = params.smooth_abs_eps;

  // Per-step terms; both value and gradient integrate robot positions from
  // the anchor, so position effects chain to every earlier velocity.
  const auto positions = [win, n, dt](const VecX& w) {
    std::vector<Vec2> x(static_cast<size_t>(n));
    Vec2 p = win.anchor;
    for (int t = 0; t < n; ++t) {
      p += dt * Vec2(w.segment<2>(2 * t));
      x[static_cast<size_t>(t)] = p;
    }
    return x;
  };

  MotionFunctional out;
  out.w_observed = win.w_observed;
  const double cap = params.speed_limit;

  if (theta == Intent::kHumanPriority) {
    // Per step: (separation direction)·(relative velocity) damped by
    // distance — the robot is expected not to advance on the human.
    out.value = [win, positions, n, cap](const VecX& w) {
      const auto x = positions(w);
      double total = 0.0;
      for (int t = 0; t < n; ++t) {
        const Vec2 diff = win.human_pos[static_cast<size_t>(t)] -
                          x[static_cast<size_t>(t)];
        const double s = diff.squaredNorm();
        const double ds = std::sqrt(s + kPosEps);
        const Vec2 rel =
            win.human_vel[static_cast<size_t>(t)] - Vec2(w.segment<2>(2 * t));
        const double speed = std::sqrt(
            w.segment<2>(2 * t).squaredNorm() + kSpeedEps * kSpeedEps);
        total += diff.dot(rel) / (ds * damp(s)) + barrier(speed, cap);
      }
      return total;
    };
    out.gradient = [win, positions, n, dt, cap](const VecX& w) {
      const auto x = positions(w);
      VecX g = VecX::Zero(2 * n);
      Vec2 suffix{0.0, 0.0};  // Σ_{t ≥ j} ∂R_t/∂diff_t, chained by −dt
      for (int t = n - 1; t >= 0; --t) {
        const Vec2 diff = win.human_pos[static_cast<size_t>(t)] -
                          x[static_cast<size_t>(t)];
        const double s = diff.squaredNorm();
        const double ds = std::sqrt(s + kPosEps);
        const double dp = damp(s);
        const double phi = 1.0 / (ds * dp);
        const double dphi =
            -(dp / (2.0 * ds) + ds * damp_deriv(s)) / (ds * ds * dp * dp);
        const Vec2 wt = w.segment<2>(2 * t);
        const Vec2 rel = win.human_vel[static_cast<size_t>(t)] - wt;
        const double speed =
            std::sqrt(wt.squaredNorm() + kSpeedEps * kSpeedEps);

        suffix += rel * phi + 2.0 * diff.dot(rel) * dphi * diff;
        g.segment<2>(2 * t) = -dt * suffix - phi * diff +
                              barrier_deriv(speed, cap) * (wt / speed);
      }
      return g;
    };
  } else {
    // Per step: −|speed − desired| damped by distance — the robot is
    // expected to keep cruising.
    out.value = [win, positions, n, v_d, abs_eps, cap](const VecX& w) {
      const auto x = positions(w);
      double total = 0.0;
      for (int t = 0; t < n; ++t) {
        const Vec2 diff = win.human_pos[static_cast<size_t>(t)] -
                          x[static_cast<size_t>(t)];
        const double speed = std::sqrt(
            w.segment<2>(2 * t).squaredNorm() + kSpeedEps * kSpeedEps);
        const double z = speed - v_d;
        total += -std::sqrt(z * z + abs_eps * abs_eps) /
                     damp(diff.squaredNorm()) +
                 barrier(speed, cap);
      }
      return total;
    };
    out.gradient = [win, positions, n, dt, v_d, abs_eps, cap](const VecX& w) {
      const auto x = positions(w);
      VecX g = VecX::Zero(2 * n);
      Vec2 suffix{0.0, 0.0};
      for (int t = n - 1; t >= 0; --t) {
        const Vec2 diff = win.human_pos[static_cast<size_t>(t)] -
                          x[static_cast<size_t>(t)];
        const double s = diff.squaredNorm();
        const double dp = damp(s);
        const Vec2 wt = w.segment<2>(2 * t);
        const double speed =
            std::sqrt(wt.squaredNorm() + kSpeedEps * kSpeedEps);
        const double z = speed - v_d;
        const double sab = std::sqrt(z * z + abs_eps * abs_eps);

        suffix += sab * damp_deriv(s) / (dp * dp) * 2.0 * diff;
        g.segment<2>(2 * t) =
            -dt * suffix +
            (-(z / sab) / dp + barrier_deriv(speed, cap)) * (wt / speed);
      }
      return g;
    };
  }
  return out;
}

ImplicitEvidence implicit_likelihood(Intent theta,
                                     const RobotTrajectory& xi_r_hist,
                                     const HumanTrajectory& xi_h_hist,
                                     const FeatureScales& scales,
                                     const IntentParams& params) {
  const RobotTrajectory rr = tail(xi_r_hist, params.history_window);
  const HumanTrajectory hh = tail(xi_h_hist, params.history_window);

  const MotionFunctional f =
      motion_reward_functional(theta, rr, hh, scales, params);
  // The numerator is the exact (unsmoothed) reward of the recorded window.
  const double log_num = expected_robot_reward(theta, rr, hh, scales);
  return normalize_by_laplace(f.value, f.gradient, log_num, f.w_observed,
                              params.min_curvature);
}

ImplicitEvidence implicit_likelihood_from_functional(
    const Objective& reward, const GradientFn& grad, const VecX& w_observed,
    const VecX& w_init, double min_curvature) {
  return normalize_by_laplace(reward, grad, reward(w_observed), w_init,
                              min_curvature);
}

IntentBelief combine_evidence(double log_implicit_h, double log_implicit_r,
                              double explicit_h, double explicit_r,
                              const IntentBelief& prior) {
  if (!prior.valid()) throw std::invalid_argument("invalid prior belief");
  if (explicit_h < 0.0 || explicit_r < 0.0)
    throw std::invalid_argument("explicit evidence must be non-negative");

  const double log_mass_h =
      log_implicit_h + std::log(explicit_h) + std::log(prior.p_human_priority);
  const double log_mass_r = log_implicit_r + std::log(explicit_r) +
                            std::log(1.0 - prior.p_human_priority);
  if (!(log_mass_h > -std::numeric_limits<double>::infinity()) &&
      !(log_mass_r > -std::numeric_limits<double>::infinity()))
    throw std::logic_error("intent posterior has no mass");

  const double m = std::max(log_mass_h, log_mass_r);
  const double lse =
      m + std::log(std::exp(log_mass_h - m) + std::exp(log_mass_r - m));
  return {std::exp(log_mass_h - lse)};
}

IntentBelief intent_posterior(const std::optional<CommEvent>& comm,
                              const RobotTrajectory& xi_r_hist,
                              const HumanTrajectory& xi_h_hist, double t,
                              const FeatureScales& scales,
                              const DecayParams& decay,
                              const IntentParams& params,
                              const IntentBelief& prior,
                              PosteriorDiagnostics* diag) {
  const ImplicitEvidence ih = implicit_likelihood(
      Intent::kHumanPriority, xi_r_hist, xi_h_hist, scales, params);
  const ImplicitEvidence ir = implicit_likelihood(
      Intent::kRobotPriority, xi_r_hist, xi_h_hist, scales, params);
  const double eh =
      explicit_likelihood(comm, Intent::kHumanPriority, t, decay);
  const double er =
      explicit_likelihood(comm, Intent::kRobotPriority, t, decay);

  if (diag) {
    diag->log_implicit_human = ih.log_likelihood;
    diag->log_implicit_robot = ir.log_likelihood;
    diag->explicit_human = eh;
    diag->explicit_robot = er;
    diag->regularized = ih.regularized || ir.regularized;
  }
  return combine_evidence(ih.log_likelihood, ir.log_likelihood, eh, er, prior);
}

}  // namespace socnav
