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

#ifndef SOCNAV_INTENT_H_
#define SOCNAV_INTENT_H_

#include <optional>

#include "socnav/config.hpp"
#include "socnav/dynamics.hpp"
#include "socnav/optim.hpp"
#include "socnav/types.hpp"

namespace socnav {

/// Binary belief over the robot's priority intent; by assumption the human
/// behaves in human-priority mode with the same probability.
struct IntentBelief {
  double p_human_priority = 0.5;

  double p(Intent theta) const {
    return theta == Intent::kHumanPriority ? p_human_priority
                                           : 1.0 - p_human_priority;
  }
  bool valid() const {
    return std::isfinite(p_human_priority) && p_human_priority >= 0.0 &&
           p_human_priority <= 1.0;
  }
};

/// The most recent explicit communication and when it was emitted.
struct CommEvent {
  Intent message = Intent::kHumanPriority;
  double t_c = 0.0;  // seconds
};

/// Distribution over human behavior modes. Currently the identity map of the
/// intent belief; the seam where risk-sensitive remappings would plug in.
struct ModeDistribution {
  double p_human_priority = 0.5;

  double p(Intent mode) const {
    return mode == Intent::kHumanPriority ? p_human_priority
                                          : 1.0 - p_human_priority;
  }
};

ModeDistribution behavior_mode_distribution(const IntentBelief& belief);

/// Un-normalized evidence carried by an explicit communication at time t:
/// A·exp(−(t−t_c)/M) + 1 when the message matches theta, 1 otherwise or when
/// no communication has happened. Throws if t precedes the emission.
double explicit_likelihood(const std::optional<CommEvent>& comm, Intent theta,
                           double t, const DecayParams& params = {});

struct ImplicitEvidence {
  double log_likelihood = 0.0;
  bool regularized = false;  // normalizer Hessian needed eigenvalue clamping
};

/// Smoothed intent-conditioned motion reward over stacked per-step robot
/// velocity perturbations w (positions re-integrate from the window's first
/// state). This is the integrand of the implicit-evidence normalizer; the
/// absolute value, speed norm, and distance damping are smoothed so the
/// functional is twice differentiable.
struct MotionFunctional {
  Objective value;
  GradientFn gradient;
  VecX w_observed;  // finite-difference velocities of the recorded window
};

MotionFunctional motion_reward_functional(Intent theta,
                                          const RobotTrajectory& xi_r_hist,
                                          const HumanTrajectory& xi_h_hist,
                                          const FeatureScales& scales,
                                          const IntentParams& params = {});

/// p(ξ_r | θ, ξ_h): exp of the observed intent-conditioned motion reward,
/// normalized over robot motion perturbations by a second-order expansion
/// around the maximizing perturbation. Histories must align and provide at
/// least two states; only the trailing `params.history_window` steps are
/// used. Near-flat normalizer Hessians are clamped (flagged); this is what
/// makes far-away motion carry no evidence.
ImplicitEvidence implicit_likelihood(Intent theta,
                                     const RobotTrajectory& xi_r_hist,
                                     const HumanTrajectory& xi_h_hist,
                                     const FeatureScales& scales,
                                     const IntentParams& params = {});

/// Same normalization machinery over an arbitrary functional — the oracle
/// seam for closed-form Gaussian checks. The Hessian at the maximizer is
/// taken by central finite differences of `grad`, as in production.
ImplicitEvidence implicit_likelihood_from_functional(
    const Objective& reward, const GradientFn& grad, const VecX& w_observed,
    const VecX& w_init, double min_curvature = 1.0);

/// Bayes combination of the two evidence channels with a prior; exposed so
/// the monotonicity and decay analytics can be checked in closed form.
/// Throws when the total posterior mass vanishes.
IntentBelief combine_evidence(double log_implicit_h, double log_implicit_r,
                              double explicit_h, double explicit_r,
                              const IntentBelief& prior = {});

struct PosteriorDiagnostics {
  double log_implicit_human = 0.0;
  double log_implicit_robot = 0.0;
  double explicit_human = 1.0;
  double explicit_robot = 1.0;
  bool regularized = false;
};

/// Full intent posterior from one history window: implicit motion evidence
/// times decaying explicit-communication evidence times the prior,
/// normalized over the two intents.
IntentBelief intent_posterior(const std::optional<CommEvent>& comm,
                              const RobotTrajectory& xi_r_hist,
                              const HumanTrajectory& xi_h_hist, double t,
                              const FeatureScales& scales,
                              const DecayParams& decay = {},
                              const IntentParams& params = {},
                              const IntentBelief& prior = {},
                              PosteriorDiagnostics* diag = nullptr);

}  // namespace socnav

#endif  // SOCNAV_INTENT_H_
