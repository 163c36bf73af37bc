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

#include "socnav/laplace.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace socnav {

bool clamp_negative_definite(MatX& h, double min_curvature) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hessian not square");
  Eigen::SelfAdjointEigenSolver<MatX> eig(h);
  VecX lambda = eig.eigenvalues();
  bool shifted = false;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > -min_curvature) {
      lambda(i) = -min_curvature;
      shifted = true;
    }
  }
  if (shifted)
    h = eig.eigenvectors() * lambda.asDiagonal() *
        eig.eigenvectors().transpose();
  return shifted;
}

double laplace_log_integral(double f_star, const MatX& hessian,
                            double min_curvature, bool* regularized) {
  if (hessian.rows() != hessian.cols())
    throw std::invalid_argument("hessian not square");
  if (!std::isfinite(f_star))
    throw std::invalid_argument("non-finite maximum value");

  Eigen::SelfAdjointEigenSolver<MatX> eig(hessian, Eigen::EigenvaluesOnly);
  bool shifted = false;
  double log_det_neg = 0.0;  // log det(−H) from clamped eigenvalues
  for (Eigen::Index i = 0; i < hessian.rows(); ++i) {
    double lambda = eig.eigenvalues()(i);
    if (lambda > -min_curvature) {
      lambda = -min_curvature;
      shifted = true;
    }
    log_det_neg += std::log(-lambda);
  }
  if (regularized) *regularized = shifted;

  const double d = static_cast<double>(hessian.rows());
  return f_star + 0.5 * d * std::log(2.0 * M_PI) - 0.5 * log_det_neg;
}

}  // namespace socnav
