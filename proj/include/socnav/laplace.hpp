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

#ifndef SOCNAV_LAPLACE_H_
#define SOCNAV_LAPLACE_H_

#include "socnav/types.hpp"

namespace socnav {

/// Shifts eigenvalues of the symmetric matrix `h` so every one is at most
/// -min_curvature, rebuilding h in place. Returns true when any eigenvalue
/// moved (i.e. h was not sufficiently negative definite).
bool clamp_negative_definite(MatX& h, double min_curvature);

/// Second-order estimate of log ∫ exp(f(x)) dx over R^d given the maximal
/// value f* and the (symmetric) Hessian of f at the maximizer:
///     f* + (d/2) log(2π) − ½ log det(−H).
/// Indefinite Hessians are eigenvalue-clamped as above; `regularized`
/// (optional) reports whether that happened.
double laplace_log_integral(double f_star, const MatX& hessian,
                            double min_curvature = 1e-3,
                            bool* regularized = nullptr);

}  // namespace socnav

#endif  // SOCNAV_LAPLACE_H_
