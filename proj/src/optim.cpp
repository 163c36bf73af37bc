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

#include "socnav/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace socnav {

AscentResult maximize(const Objective& f, const GradientFn& grad,
                      const VecX& x0, const AscentOptions& opts,
                      const Projection& project) {
  const auto proj = [&project](const VecX& x) -> VecX {
    return project ? project(x) : x;
  };

  AscentResult res;
  res.x = proj(x0);
  res.value = f(res.x);
  if (!std::isfinite(res.value))
    throw std::invalid_argument("objective not finite at the initial point");

  double step = opts.initial_step;
  for (res.iterations = 0; res.iterations < opts.max_iterations;
       ++res.iterations) {
    const VecX g = grad(res.x);
    // Stationarity for the constrained problem: a unit-step projected move
    // that stays put means no feasible ascent direction remains.
    res.grad_norm = (proj(res.x + g) - res.x).norm();
    if (res.grad_norm <= opts.grad_tolerance) {
      res.converged = true;
      return res;
    }

    bool accepted = false;
    double alpha = std::min(step * 2.0, opts.max_step);
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      const VecX cand = proj(res.x + alpha * g);
      const double cand_value = f(cand);
      // Armijo condition in its projected form: credit only the realized
      // displacement, so boundary-clipped steps are judged fairly.
      const double expected = opts.armijo * g.dot(cand - res.x);
      if (std::isfinite(cand_value) && cand_value >= res.value + expected &&
          cand_value > res.value) {
        res.x = cand;
        res.value = cand_value;
        step = alpha;
        accepted = true;
        break;
      }
      alpha *= opts.step_shrink;
    }
    if (!accepted) {
      res.line_search_failed = true;
      return res;
    }
  }
  // Ran out of iterations; report stationarity at the last iterate.
  res.grad_norm = (proj(res.x + grad(res.x)) - res.x).norm();
  res.converged = res.grad_norm <= opts.grad_tolerance;
  return res;
}

Projection box_projection(const VecX& lo, const VecX& hi) {
  return [lo, hi](const VecX& x) -> VecX {
    return x.cwiseMax(lo).cwiseMin(hi);
  };
}

Projection block_ball_projection(int block, double radius) {
  if (block <= 0) throw std::invalid_argument("block size must be positive");
  return [block, radius](const VecX& x) -> VecX {
    VecX out = x;
    for (Eigen::Index i = 0; i + block <= x.size(); i += block) {
      const double n = out.segment(i, block).norm();
      if (n > radius) out.segment(i, block) *= radius / n;
    }
    return out;
  };
}

}  // namespace socnav
