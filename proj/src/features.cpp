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

#include "socnav/features.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace socnav {

namespace {

constexpr double kGoalEps = 1e-9;  // softening of ||x_N - g|| at the goal

// Value/gradient/Hessian of a per-step scalar term in a 2-D argument.
struct Term2 {
  double value = 0.0;
  Vec2 grad{0.0, 0.0};
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

// exp(-dist^2 / D_o^2) against the nearest obstacle disc; flat (value 1)
// inside a disc so the penalty cannot reward digging deeper into it.
Term2 obstacle_term(const Vec2& x, const std::vector<Obstacle>& obstacles,
                    double scale) {
  Term2 best;  // value 0 when there are no obstacles
  double best_dist = std::numeric_limits<double>::infinity();
  const Obstacle* nearest = nullptr;
  for (const Obstacle& o : obstacles) {
    const double dist = std::max((x - o.center).norm() - o.radius, 0.0);
    if (dist < best_dist) {
      best_dist = dist;
      nearest = &o;
    }
  }
  if (!nearest) return best;

  const Vec2 e = x - nearest->center;
  const double n = e.norm();
  const double s = n - nearest->radius;
  if (s <= 0.0 || n < 1e-12) {
    best.value = 1.0;
    return best;
  }
  const double d2 = scale * scale;
  const double phi = std::exp(-s * s / d2);
  const Vec2 u = e / n;
  const double dphi = -2.0 * s / d2 * phi;
  const double ddphi = (4.0 * s * s / (d2 * d2) - 2.0 / d2) * phi;
  best.value = phi;
  best.grad = dphi * u;
  best.hess = ddphi * (u * u.transpose()) +
              dphi / n * (Eigen::Matrix2d::Identity() - u * u.transpose());
  return best;
}

// exp(-||d||^2 / D_r^2) in the separation d = x_h - x_r.
Term2 avoidance_term(const Vec2& d, double scale) {
  const double s2 = scale * scale;
  const double phi = std::exp(-d.squaredNorm() / s2);
  Term2 t;
  t.value = phi;
  t.grad = -2.0 / s2 * phi * d;
  t.hess = phi * (4.0 / (s2 * s2) * (d * d.transpose()) -
                  2.0 / s2 * Eigen::Matrix2d::Identity());
  return t;
}

// exp(-d^T M d) in the offset d from the front-of-robot center, M = D_f^-1.
Term2 front_term(const Vec2& d, const Eigen::Matrix2d& m) {
  const Vec2 md = m * d;
  const double phi = std::exp(-d.dot(md));
  Term2 t;
  t.value = phi;
  t.grad = -2.0 * phi * md;
  t.hess = phi * (4.0 * (md * md.transpose()) - 2.0 * m);
  return t;
}

// ||x_N - g|| softened at zero distance.
Term2 goal_term(const Vec2& x, const Vec2& goal) {
  const Vec2 d = x - goal;
  const double r = std::sqrt(d.squaredNorm() + kGoalEps * kGoalEps);
  Term2 t;
  t.value = r;
  t.grad = d / r;
  t.hess = Eigen::Matrix2d::Identity() / r - (d * d.transpose()) / (r * r * r);
  return t;
}

// Human states under the unclamped constant-acceleration model, rebuilt from
// the start state and recorded controls (what the derivatives assume).
struct LinearStates {
  std::vector<Vec2> pos;  // index t-1 holds step t
  std::vector<Vec2> vel;
};

LinearStates linear_human_states(const HumanTrajectory& xi_h) {
  const int n = xi_h.length();
  LinearStates out;
  out.pos.reserve(static_cast<size_t>(n));
  out.vel.reserve(static_cast<size_t>(n));
  Vec2 x = xi_h.start.pos();
  Vec2 v = xi_h.start.vel();
  for (int t = 1; t <= n; ++t) {
    const Vec2 a = xi_h.action(t).vec();
    x += v * xi_h.dt + 0.5 * a * xi_h.dt * xi_h.dt;
    v += a * xi_h.dt;
    out.pos.push_back(x);
    out.vel.push_back(v);
  }
  return out;
}

void check_aligned(const HumanTrajectory& xi_h, const RobotTrajectory& xi_r) {
  if (xi_h.length() != xi_r.length())
    throw std::invalid_argument("trajectory length mismatch");
  if (std::abs(xi_h.dt - xi_r.dt) > 1e-12)
    throw std::invalid_argument("trajectory dt mismatch");
  if (xi_h.length() < 1)
    throw std::invalid_argument("empty trajectory window");
}

// Front-penalty geometry at one robot pose.
struct FrontFrame {
  Vec2 center;          // x_f = x_r + offset * heading_vec
  Eigen::Matrix2d m;    // D_f^-1 in world frame
  Eigen::Matrix2d m_dt; // dM/d(heading)
  Vec2 e_heading;       // heading unit vector
  Vec2 e_perp;          // its heading-derivative (-sin, cos)
};

FrontFrame front_frame(const RobotState& s, const FeatureScales& scales) {
  FrontFrame f;
  const double c = std::cos(s.heading), sn = std::sin(s.heading);
  f.e_heading = Vec2(c, sn);
  f.e_perp = Vec2(-sn, c);
  f.center = s.pos() + scales.front_offset * f.e_heading;
  Eigen::Matrix2d rot;
  rot << c, -sn, sn, c;
  f.m = rot *
        Eigen::Vector2d(1.0 / scales.front_major, 1.0 / scales.front_minor)
            .asDiagonal() *
        rot.transpose();
  Eigen::Matrix2d skew;
  skew << 0.0, -1.0, 1.0, 0.0;
  f.m_dt = skew * f.m - f.m * skew;
  return f;
}

FeatureVec eval_on_states(const std::vector<Vec2>& pos_h,
                          const std::vector<Vec2>& vel_h,
                          const HumanTrajectory& xi_h,
                          const RobotTrajectory& xi_r, const FeatureEnv& env) {
  FeatureVec f = FeatureVec::Zero();
  const int n = xi_h.length();
  for (int t = 1; t <= n; ++t) {
    const Vec2& xh = pos_h[static_cast<size_t>(t - 1)];
    f(kFeatVelocity) += vel_h[static_cast<size_t>(t - 1)].squaredNorm();
    f(kFeatAcceleration) += xi_h.action(t).vec().squaredNorm();
    f(kFeatObstacle) +=
        obstacle_term(xh, env.obstacles, env.scales.obstacle_scale).value;
    const RobotState& sr = xi_r.state(t);
    f(kFeatAvoidance) +=
        avoidance_term(xh - sr.pos(), env.scales.avoidance_scale).value;
    const FrontFrame ff = front_frame(sr, env.scales);
    f(kFeatFront) += front_term(xh - ff.center, ff.m).value;
  }
  f(kFeatGoal) = goal_term(pos_h[static_cast<size_t>(n - 1)], env.human_goal).value;
  return f;
}

}  // namespace

FeatureVec eval_features(const HumanTrajectory& xi_h,
                         const RobotTrajectory& xi_r, const FeatureEnv& env) {
  check_aligned(xi_h, xi_r);
  std::vector<Vec2> pos_h, vel_h;
  pos_h.reserve(static_cast<size_t>(xi_h.length()));
  vel_h.reserve(static_cast<size_t>(xi_h.length()));
  for (int t = 1; t <= xi_h.length(); ++t) {
    pos_h.push_back(xi_h.state(t).pos());
    vel_h.push_back(xi_h.state(t).vel());
  }
  return eval_on_states(pos_h, vel_h, xi_h, xi_r, env);
}

std::array<VecX, kNumFeatures> grad_features_wrt_human_controls(
    const HumanTrajectory& xi_h, const RobotTrajectory& xi_r,
    const FeatureEnv& env) {
  check_aligned(xi_h, xi_r);
  const int n = xi_h.length();
  const double dt = xi_h.dt;
  const LinearStates st = linear_human_states(xi_h);

  std::array<VecX, kNumFeatures> g;
  for (auto& v : g) v = VecX::Zero(2 * n);

  // d(pos_t)/d(u_k) = pc(t,k) I, d(vel_t)/d(u_k) = dt I for k <= t.
  for (int t = 1; t <= n; ++t) {
    const Vec2& xh = st.pos[static_cast<size_t>(t - 1)];
    const Vec2& vh = st.vel[static_cast<size_t>(t - 1)];
    const Vec2 vel_grad = 2.0 * vh;  // d||v||^2/dv
    const Term2 obs = obstacle_term(xh, env.obstacles, env.scales.obstacle_scale);
    const RobotState& sr = xi_r.state(t);
    const Term2 avoid = avoidance_term(xh - sr.pos(), env.scales.avoidance_scale);
    const FrontFrame ff = front_frame(sr, env.scales);
    const Term2 front = front_term(xh - ff.center, ff.m);
    for (int k = 1; k <= t; ++k) {
      const double pc = human_pos_coeff(t, k, dt);
      auto blk = [&](std::array<VecX, kNumFeatures>& a, int i) {
        return a[static_cast<size_t>(i)].segment<2>(2 * (k - 1));
      };
      blk(g, kFeatVelocity) += dt * vel_grad;
      blk(g, kFeatObstacle) += pc * obs.grad;
      blk(g, kFeatAvoidance) += pc * avoid.grad;
      blk(g, kFeatFront) += pc * front.grad;
    }
  }

  const Term2 goal = goal_term(st.pos[static_cast<size_t>(n - 1)], env.human_goal);
  for (int k = 1; k <= n; ++k)
    g[kFeatGoal].segment<2>(2 * (k - 1)) = human_pos_coeff(n, k, dt) * goal.grad;

  g[kFeatAcceleration] = 2.0 * stack_controls(xi_h);
  return g;
}

std::array<MatX, kNumFeatures> hessian_features_wrt_human_controls(
    const HumanTrajectory& xi_h, const RobotTrajectory& xi_r,
    const FeatureEnv& env) {
  check_aligned(xi_h, xi_r);
  const int n = xi_h.length();
  const double dt = xi_h.dt;
  const LinearStates st = linear_human_states(xi_h);

  std::array<MatX, kNumFeatures> h;
  for (auto& m : h) m = MatX::Zero(2 * n, 2 * n);

  for (int t = 1; t <= n; ++t) {
    const Vec2& xh = st.pos[static_cast<size_t>(t - 1)];
    const Term2 obs = obstacle_term(xh, env.obstacles, env.scales.obstacle_scale);
    const RobotState& sr = xi_r.state(t);
    const Term2 avoid = avoidance_term(xh - sr.pos(), env.scales.avoidance_scale);
    const FrontFrame ff = front_frame(sr, env.scales);
    const Term2 front = front_term(xh - ff.center, ff.m);
    for (int k = 1; k <= t; ++k) {
      const double pk = human_pos_coeff(t, k, dt);
      for (int l = 1; l <= t; ++l) {
        const double pl = human_pos_coeff(t, l, dt);
        auto blk = [&](std::array<MatX, kNumFeatures>& a, int i) {
          return a[static_cast<size_t>(i)].block<2, 2>(2 * (k - 1), 2 * (l - 1));
        };
        blk(h, kFeatVelocity) += 2.0 * dt * dt * Eigen::Matrix2d::Identity();
        blk(h, kFeatObstacle) += pk * pl * obs.hess;
        blk(h, kFeatAvoidance) += pk * pl * avoid.hess;
        blk(h, kFeatFront) += pk * pl * front.hess;
      }
    }
  }

  const Term2 goal = goal_term(st.pos[static_cast<size_t>(n - 1)], env.human_goal);
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= n; ++l)
      h[kFeatGoal].block<2, 2>(2 * (k - 1), 2 * (l - 1)) =
          human_pos_coeff(n, k, dt) * human_pos_coeff(n, l, dt) * goal.hess;

  h[kFeatAcceleration] = 2.0 * MatX::Identity(2 * n, 2 * n);

  // Numerical symmetrization (the per-term math is already symmetric).
  for (auto& m : h) m = 0.5 * (m + m.transpose()).eval();
  return h;
}

double human_reward(const FeatureVec& w, const HumanTrajectory& xi_h,
                    const RobotTrajectory& xi_r, const FeatureEnv& env) {
  return w.dot(eval_features(xi_h, xi_r, env));
}

VecX grad_human_reward(const FeatureVec& w, const HumanTrajectory& xi_h,
                       const RobotTrajectory& xi_r, const FeatureEnv& env) {
  const auto g = grad_features_wrt_human_controls(xi_h, xi_r, env);
  VecX out = VecX::Zero(2 * xi_h.length());
  for (int i = 0; i < kNumFeatures; ++i) out += w(i) * g[static_cast<size_t>(i)];
  return out;
}

MatX hessian_human_reward(const FeatureVec& w, const HumanTrajectory& xi_h,
                          const RobotTrajectory& xi_r, const FeatureEnv& env) {
  const auto h = hessian_features_wrt_human_controls(xi_h, xi_r, env);
  MatX out = MatX::Zero(2 * xi_h.length(), 2 * xi_h.length());
  for (int i = 0; i < kNumFeatures; ++i) out += w(i) * h[static_cast<size_t>(i)];
  return out;
}

MatX mixed_hessian_human_reward(const FeatureVec& w,
                                const HumanTrajectory& xi_h,
                                const RobotTrajectory& xi_r,
                                const FeatureEnv& env) {
  check_aligned(xi_h, xi_r);
  const int n = xi_h.length();
  const double dt = xi_h.dt;
  const LinearStates st = linear_human_states(xi_h);
  const RobotRolloutJacobian jac(xi_r);

  MatX out = MatX::Zero(2 * n, 2 * n);
  if (w(kFeatAvoidance) == 0.0 && w(kFeatFront) == 0.0) return out;

  for (int t = 1; t <= n; ++t) {
    const Vec2& xh = st.pos[static_cast<size_t>(t - 1)];
    const RobotState& sr = xi_r.state(t);

    const Term2 avoid = avoidance_term(xh - sr.pos(), env.scales.avoidance_scale);

    const FrontFrame ff = front_frame(sr, env.scales);
    const Vec2 d = xh - ff.center;
    const Term2 front = front_term(d, ff.m);
    // Heading sensitivity of the front term's d-gradient G = -2 φ M d,
    // holding d fixed: dG/dθ = 2 φ (dᵀ M' d) M d − 2 φ M' d.
    const Vec2 md = ff.m * d;
    const Vec2 mtd = ff.m_dt * d;
    const Vec2 dgrad_dtheta =
        2.0 * front.value * d.dot(mtd) * md - 2.0 * front.value * mtd;

    for (int j = 1; j <= t; ++j) {
      const Eigen::Matrix<double, 3, 2>& jb = jac.block(t, j);
      const Eigen::Matrix2d jpos = jb.topRows<2>();
      const Eigen::Matrix<double, 1, 2> jth = jb.bottomRows<1>();

      // d(xh - xr)/du_rj and d(xh - x_f)/du_rj.
      const Eigen::Matrix2d davoid = -jpos;
      const Eigen::Matrix2d dfront =
          -jpos - env.scales.front_offset * (ff.e_perp * jth);

      const Eigen::Matrix2d cross =
          w(kFeatAvoidance) * (avoid.hess * davoid) +
          w(kFeatFront) * (front.hess * dfront + dgrad_dtheta * jth);

      for (int k = 1; k <= t; ++k)
        out.block<2, 2>(2 * (k - 1), 2 * (j - 1)) +=
            human_pos_coeff(t, k, dt) * cross;
    }
  }
  return out;
}

double expected_robot_reward(Intent theta, const RobotTrajectory& xi_r,
                             const HumanTrajectory& xi_h,
                             const FeatureScales& scales) {
  check_aligned(xi_h, xi_r);
  const double dt = xi_r.dt;
  double reward = 0.0;
  for (int t = 1; t <= xi_r.length(); ++t) {
    const Vec2 xr = xi_r.state(t).pos();
    const Vec2 vr = (xr - xi_r.state(t - 1).pos()) / dt;
    const Vec2 xh = xi_h.state(t).pos();
    const Vec2 e = xh - xr;
    const double dist = e.norm();
    const double damp = std::max(dist * dist, 1.0);
    if (theta == Intent::kHumanPriority) {
      if (dist < 1e-9) continue;  // direction undefined at contact
      // Separation rate along the robot→human line; yielding robots score
      // higher than advancing ones.
      reward += (e / dist).dot(xi_h.state(t).vel() - vr) / damp;
    } else {
      reward -= std::abs(vr.norm() - scales.desired_speed) / damp;
    }
  }
  return reward;
}

}  // namespace socnav
