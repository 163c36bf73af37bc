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

#ifndef SOCNAV_IRL_H_
#define SOCNAV_IRL_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "socnav/features.hpp"
#include "socnav/optim.hpp"
#include "socnav/types.hpp"

namespace socnav {

/// One labeled horizon window of human/robot motion.
struct Demonstration {
  HumanTrajectory xi_h;
  RobotTrajectory xi_r;
  FeatureEnv env;
  Intent label = Intent::kHumanPriority;
};

/// Weights for both behavior modes, ordered per FeatureIndex.
struct ModeWeights {
  FeatureVec human_priority;
  FeatureVec robot_priority;

  const FeatureVec& of(Intent mode) const {
    return mode == Intent::kHumanPriority ? human_priority : robot_priority;
  }
};

/// Hand-tuned weights that produce plausible pedestrian behavior out of the
/// box (training refines them). Negative throughout: features are penalties.
ModeWeights default_mode_weights();

struct LikelihoodOptions {
  double min_curvature = 1e-3;  // eigenvalue floor for the normalizer Hessian
  AscentOptions argmax;         // inner maximizer settings

  LikelihoodOptions() {
    argmax.max_iterations = 300;
    argmax.grad_tolerance = 1e-6;
  }
};

struct LogLikelihood {
  double value = 0.0;
  bool regularized = false;  // normalizer Hessian needed clamping
  VecX u_star;               // maximizing stacked controls (warm-start cache)
};

/// log p(ξ_h | ξ_r, env; w) = w·f(ξ_h) − log Z, with log Z from a
/// second-order expansion of w·f around its maximizer over the stacked human
/// controls. `warm_start` seeds the inner maximizer (defaults to the
/// demonstrated controls).
LogLikelihood trajectory_log_likelihood(const FeatureVec& w,
                                        const HumanTrajectory& xi_h,
                                        const RobotTrajectory& xi_r,
                                        const FeatureEnv& env,
                                        const LikelihoodOptions& opts = {},
                                        const VecX* warm_start = nullptr);

/// Same normalization machinery over an arbitrary reward functional — the
/// oracle seam for closed-form Gaussian checks. `hessian` is evaluated at
/// the maximizer found from `u_init`.
LogLikelihood log_likelihood_from_functional(
    const Objective& reward, const GradientFn& grad,
    const std::function<MatX(const VecX&)>& hessian, const VecX& u_observed,
    const VecX& u_init, const LikelihoodOptions& opts = {});

struct TrainOptions {
  int max_iterations = 500;
  double grad_tolerance = 1e-5;
  std::array<bool, kNumFeatures> mask{true, true, true, true, true, true};
  LikelihoodOptions likelihood;
};

struct TrainResult {
  FeatureVec weights;
  double log_likelihood = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  bool any_regularized = false;
};

/// Maximizes the summed window log-likelihood by gradient ascent with
/// step-halving on the exact objective; accepted iterates are monotone.
/// Masked-out weight coordinates stay at their initial values.
TrainResult train(const std::vector<Demonstration>& windows,
                  const FeatureVec& init, const TrainOptions& opts = {});

struct ResponseStatus {
  bool converged = false;
  bool line_search_failed = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Seed strategy for the response argmax. The reward is multimodal — passing
/// the robot on either side is a distinct local maximum — so kMultiStart
/// seeds the ascent from a potential-field rollout, a robot-blind rollout,
/// and a mirrored-avoidance rollout (plus the warm start, when given) and
/// keeps the best-scoring solution. kSingle uses one potential-field seed:
/// cheaper, and what the online planner wants, where warm starts carry the
/// committed passing side from tick to tick.
enum class ResponseInit { kSingle, kMultiStart };

/// argmax_{ξ_h} w·f(ξ_h, ξ_r): projected gradient ascent over stacked human
/// controls, each step bounded to the acceleration ball; initialized from a
/// potential-field response unless a warm start is given. The returned
/// trajectory uses the unclamped dynamics (the model the math differentiates).
HumanTrajectory most_likely_response(const FeatureVec& w,
                                     const HumanState& s_h0,
                                     const RobotTrajectory& xi_r,
                                     const FeatureEnv& env,
                                     double accel_max = 1.5,
                                     const AscentOptions& opts = {},
                                     ResponseStatus* status = nullptr,
                                     const VecX* warm_start = nullptr,
                                     ResponseInit init = ResponseInit::kSingle);

/// Receding-horizon prediction: re-solve most_likely_response every step
/// against the robot's trajectory (repeating its last state beyond the end),
/// execute one control, advance. Returns `total_steps` steps. Solves are
/// multi-started so the prediction tracks the best response rather than the
/// seed's homotopy class (and is invariant to the scale of w, as the argmax
/// itself is).
HumanTrajectory predict_rollout(const FeatureVec& w, const HumanState& s_h0,
                                const RobotTrajectory& robot_plan,
                                const FeatureEnv& env, int total_steps,
                                int horizon, double accel_max = 1.5,
                                const AscentOptions& opts = {});

/// Mean pointwise position distance between aligned trajectories.
/// Throws on length mismatch.
double mean_pointwise_error(const HumanTrajectory& a, const HumanTrajectory& b);

/// Side of the robot (left of its heading = true) the trajectory passes on,
/// measured at the step of closest approach.
bool passes_left(const HumanTrajectory& xi_h, const RobotTrajectory& xi_r);

struct ValidationEntry {
  double error = 0.0;     // mean pointwise distance, prediction vs recorded
  bool same_side = true;  // prediction passes the robot on the recorded side
};

struct ValidationReport {
  double mean_error = 0.0;
  int type_one = 0;  // same homotopy side
  int type_two = 0;
  std::vector<ValidationEntry> entries;
};

ValidationReport cross_validate(const FeatureVec& w,
                                const std::vector<Demonstration>& held_out,
                                int horizon, double accel_max = 1.5);

// Line-delimited dataset and weight-file round trip.
void save_demonstrations(const std::string& path,
                         const std::vector<Demonstration>& demos);
std::vector<Demonstration> load_demonstrations(const std::string& path,
                                               const FeatureScales& scales);

void save_mode_weights(const std::string& path, const ModeWeights& weights,
                       const FeatureScales& provenance);
ModeWeights load_mode_weights(const std::string& path,
                              FeatureScales* provenance = nullptr);

}  // namespace socnav

#endif  // SOCNAV_IRL_H_
