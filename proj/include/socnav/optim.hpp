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

#ifndef SOCNAV_OPTIM_H_
#define SOCNAV_OPTIM_H_

#include <functional>

#include "socnav/types.hpp"

namespace socnav {

using Objective = std::function<double(const VecX&)>;
using GradientFn = std::function<VecX(const VecX&)>;
using Projection = std::function<VecX(const VecX&)>;

struct AscentOptions {
  int max_iterations = 100;
  double grad_tolerance = 1e-5;  // on the unit-step projected residual
  double initial_step = 1.0;
  double max_step = 4.0;
  double step_shrink = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 40;
};

struct AscentResult {
  VecX x;
  double value = 0.0;
  double grad_norm = 0.0;  // projected-residual norm at the final iterate
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

/// Projected gradient ascent with Armijo backtracking. `project` maps any
/// point to the feasible set (identity when null). The step size warm-starts
/// from the previous accepted step, so repeated nearby solves stay cheap.
/// Accepted iterates never decrease the objective.
AscentResult maximize(const Objective& f, const GradientFn& grad,
                      const VecX& x0, const AscentOptions& opts = {},
                      const Projection& project = nullptr);

/// Componentwise clamp to [lo, hi].
Projection box_projection(const VecX& lo, const VecX& hi);

/// Clamps each consecutive `block` coordinates to an L2 ball of the given
/// radius (per-step control bounds on stacked trajectories).
Projection block_ball_projection(int block, double radius);

}  // namespace socnav

#endif  // SOCNAV_OPTIM_H_
