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

#include "socnav/irl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "socnav/laplace.hpp"

namespace socnav {

namespace {

using nlohmann::json;

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// The likelihood and its derivatives live on the unclamped
// constant-acceleration model; saturation is a plant property, not a model
// one.
HumanControlBounds unclamped() { return {kUnbounded, kUnbounded}; }

HumanTrajectory rebuild(const HumanState& s0, double dt, const VecX& u) {
  return rollout_human(s0, unstack_human_controls(u), dt, unclamped());
}

AscentResult maximize_reward(const FeatureVec& w, const HumanState& s0,
                             double dt, const RobotTrajectory& xi_r,
                             const FeatureEnv& env, const VecX& u0,
                             const AscentOptions& opts,
                             const Projection& project) {
  const Objective f = [&](const VecX& u) {
    return human_reward(w, rebuild(s0, dt, u), xi_r, env);
  };
  const GradientFn g = [&](const VecX& u) {
    return grad_human_reward(w, rebuild(s0, dt, u), xi_r, env);
  };
  return maximize(f, g, u0, opts, project);
}

double log_partition(double f_star, const MatX& hessian, double min_curvature,
                     bool* regularized) {
  return laplace_log_integral(f_star, hessian, min_curvature, regularized);
}

// Everything train() needs from one window at the current weights:
// log-likelihood, its weight gradient, and a local Fisher (feature
// covariance) estimate used to precondition the ascent direction.
struct WindowEval {
  double value = 0.0;
  FeatureVec grad;
  MatX fisher;
  VecX u_star;
  bool regularized = false;
};

WindowEval eval_window(const FeatureVec& w, const Demonstration& d,
                       const FeatureVec& f_obs, const VecX& warm,
                       const LikelihoodOptions& opts) {
  const AscentResult res = maximize_reward(w, d.xi_h.start, d.xi_h.dt, d.xi_r,
                                           d.env, warm, opts.argmax, nullptr);
  const HumanTrajectory xi_star = rebuild(d.xi_h.start, d.xi_h.dt, res.x);

  WindowEval ev;
  ev.u_star = res.x;
  const FeatureVec f_star = eval_features(xi_star, d.xi_r, d.env);
  const std::array<VecX, kNumFeatures> fg =
      grad_features_wrt_human_controls(xi_star, d.xi_r, d.env);
  const std::array<MatX, kNumFeatures> fh =
      hessian_features_wrt_human_controls(xi_star, d.xi_r, d.env);

  MatX hess = MatX::Zero(res.x.size(), res.x.size());
  for (int i = 0; i < kNumFeatures; ++i) hess += w(i) * fh[i];
  ev.regularized = clamp_negative_definite(hess, opts.min_curvature);
  const Eigen::LLT<MatX> neg(MatX(-hess));

  const double dim = static_cast<double>(res.x.size());
  const MatX& chol = neg.matrixLLT();
  double half_log_det = 0.0;
  for (Eigen::Index i = 0; i < chol.rows(); ++i)
    half_log_det += std::log(chol(i, i));
  ev.value = w.dot(f_obs) -
             (w.dot(f_star) + 0.5 * dim * std::log(2.0 * M_PI) - half_log_det);

  // Under the local Gaussian with covariance Σ = (−H)⁻¹:
  //   E[f_i]        ≈ f_i(u*) + ½ tr(H_i Σ)
  //   Cov[f_i, f_j] ≈ g_iᵀ Σ g_j + ½ tr(H_i Σ H_j Σ)
  // The gradient is empirical-minus-expected features (envelope theorem for
  // the w·f(u*) term; the maximizer-shift term is dropped and line search on
  // the exact objective makes up for it). The covariance is the Fisher
  // information of the weight estimate.
  std::array<MatX, kNumFeatures> sol;  // Σ H_i
  std::array<VecX, kNumFeatures> sg;   // Σ g_i
  for (int i = 0; i < kNumFeatures; ++i) {
    sol[static_cast<size_t>(i)] = neg.solve(fh[static_cast<size_t>(i)]);
    sg[static_cast<size_t>(i)] = neg.solve(fg[static_cast<size_t>(i)]);
  }
  ev.fisher.resize(kNumFeatures, kNumFeatures);
  for (int i = 0; i < kNumFeatures; ++i) {
    ev.grad(i) = f_obs(i) - f_star(i) -
                 0.5 * sol[static_cast<size_t>(i)].trace();
    for (int j = i; j < kNumFeatures; ++j) {
      const double quad = 0.5 * sol[static_cast<size_t>(i)]
                                    .cwiseProduct(sol[static_cast<size_t>(j)]
                                                      .transpose())
                                    .sum();
      ev.fisher(i, j) = ev.fisher(j, i) =
          fg[static_cast<size_t>(i)].dot(sg[static_cast<size_t>(j)]) + quad;
    }
  }
  return ev;
}

// Robot-state window of length `horizon` starting at plan step k; the plan's
// last state is repeated (zero action) past its end.
RobotTrajectory robot_window(const RobotTrajectory& plan, int k, int horizon) {
  RobotTrajectory w;
  w.dt = plan.dt;
  w.start = plan.state(std::min(k, plan.length()));
  w.steps.reserve(static_cast<size_t>(horizon));
  for (int j = 1; j <= horizon; ++j) {
    const int idx = std::min(k + j, plan.length());
    const RobotAction u =
        (k + j <= plan.length()) ? plan.action(idx) : RobotAction{0.0, 0.0};
    w.steps.emplace_back(plan.state(idx), u);
  }
  return w;
}

json state_json(const HumanState& s) { return json{s.x, s.y, s.vx, s.vy}; }
json state_json(const RobotState& s) { return json{s.x, s.y, s.heading}; }

HumanState human_state_from(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
          j.at(3).get<double>()};
}

RobotState robot_state_from(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json scales_json(const FeatureScales& s) {
  return json{{"obstacle_scale", s.obstacle_scale},
              {"avoidance_scale", s.avoidance_scale},
              {"front_offset", s.front_offset},
              {"front_major", s.front_major},
              {"front_minor", s.front_minor},
              {"desired_speed", s.desired_speed}};
}

FeatureScales scales_from(const json& j) {
  FeatureScales s;
  s.obstacle_scale = j.at("obstacle_scale").get<double>();
  s.avoidance_scale = j.at("avoidance_scale").get<double>();
  s.front_offset = j.at("front_offset").get<double>();
  s.front_major = j.at("front_major").get<double>();
  s.front_minor = j.at("front_minor").get<double>();
  s.desired_speed = j.at("desired_speed").get<double>();
  return s;
}

json weights_json(const FeatureVec& w) {
  json out = json::array();
  for (int i = 0; i < kNumFeatures; ++i) out.push_back(w(i));
  return out;
}

FeatureVec weights_from(const json& j) {
  if (j.size() != kNumFeatures)
    throw std::runtime_error("weight vector must have 6 entries");
  FeatureVec w;
  for (int i = 0; i < kNumFeatures; ++i) w(i) = j.at(i).get<double>();
  return w;
}

}  // namespace

ModeWeights default_mode_weights() {
  ModeWeights w;
  // Order: velocity, acceleration, goal, obstacle, avoidance, front.
  // goal/velocity ratio sets a ~1.4 m/s preferred walking speed; the
  // robot-priority mode is far more averse to the robot's personal and
  // frontal space, so it yields instead of cutting across.
  w.human_priority << -0.22, -0.10, -1.2, -0.8, -1.5, -0.4;
  w.robot_priority << -0.22, -0.10, -1.2, -0.8, -2.0, -2.5;
  return w;
}

LogLikelihood trajectory_log_likelihood(const FeatureVec& w,
                                        const HumanTrajectory& xi_h,
                                        const RobotTrajectory& xi_r,
                                        const FeatureEnv& env,
                                        const LikelihoodOptions& opts,
                                        const VecX* warm_start) {
  if (!w.allFinite())
    throw std::invalid_argument("non-finite reward weights");
  const FeatureVec f_obs = eval_features(xi_h, xi_r, env);
  const VecX u0 = warm_start ? *warm_start : stack_controls(xi_h);

  const AscentResult res =
      maximize_reward(w, xi_h.start, xi_h.dt, xi_r, env, u0, opts.argmax,
                      nullptr);
  const HumanTrajectory xi_star = rebuild(xi_h.start, xi_h.dt, res.x);
  const MatX hess = hessian_human_reward(w, xi_star, xi_r, env);

  LogLikelihood ll;
  const double log_z =
      log_partition(res.value, hess, opts.min_curvature, &ll.regularized);
  ll.value = w.dot(f_obs) - log_z;
  ll.u_star = res.x;
  return ll;
}

LogLikelihood log_likelihood_from_functional(
    const Objective& reward, const GradientFn& grad,
    const std::function<MatX(const VecX&)>& hessian, const VecX& u_observed,
    const VecX& u_init, const LikelihoodOptions& opts) {
  const AscentResult res = maximize(reward, grad, u_init, opts.argmax);
  LogLikelihood ll;
  const double log_z = log_partition(res.value, hessian(res.x),
                                     opts.min_curvature, &ll.regularized);
  ll.value = reward(u_observed) - log_z;
  ll.u_star = res.x;
  return ll;
}

TrainResult train(const std::vector<Demonstration>& windows,
                  const FeatureVec& init, const TrainOptions& opts) {
  if (windows.empty())
    throw std::invalid_argument("training needs at least one demonstration");
  if (!init.allFinite())
    throw std::invalid_argument("non-finite initial weights");

  const size_t n = windows.size();
  std::vector<FeatureVec> f_obs(n);
  std::vector<VecX> warm(n);
  for (size_t k = 0; k < n; ++k) {
    f_obs[k] = eval_features(windows[k].xi_h, windows[k].xi_r, windows[k].env);
    warm[k] = stack_controls(windows[k].xi_h);
  }

  TrainResult out;
  out.weights = init;

  // Re-solves every window maximizer from the given warm starts; updates the
  // warm starts in place and returns the summed log-likelihood.
  std::vector<WindowEval> evals(n);
  const auto eval_all = [&](const FeatureVec& w, std::vector<VecX>& warms,
                            std::vector<WindowEval>& evs) {
    double total = 0.0;
    for (size_t k = 0; k < n; ++k) {
      evs[k] = eval_window(w, windows[k], f_obs[k], warms[k], opts.likelihood);
      warms[k] = evs[k].u_star;
      total += evs[k].value;
      out.any_regularized |= evs[k].regularized;
    }
    return total;
  };

  double value = eval_all(out.weights, warm, evals);
  double step = 1.0;

  std::vector<int> active;
  for (int i = 0; i < kNumFeatures; ++i)
    if (opts.mask[static_cast<size_t>(i)]) active.push_back(i);

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    out.iterations = iter;

    FeatureVec g = FeatureVec::Zero();
    MatX fisher = MatX::Zero(kNumFeatures, kNumFeatures);
    for (size_t k = 0; k < n; ++k) {
      g += evals[k].grad;
      fisher += evals[k].fisher;
    }
    for (int i = 0; i < kNumFeatures; ++i)
      if (!opts.mask[static_cast<size_t>(i)]) g(i) = 0.0;
    out.grad_norm = g.norm();
    if (out.grad_norm <= opts.grad_tolerance) {
      out.converged = true;
      break;
    }

    // Natural-gradient direction: precondition by the summed Fisher over the
    // unmasked coordinates. The weight coordinates span several orders of
    // magnitude, so the plain gradient crawls; the Fisher solve makes the
    // ascent scale-free. Falls back to the raw gradient when the solve fails
    // to produce an ascent direction.
    const Eigen::Index na = static_cast<Eigen::Index>(active.size());
    MatX fa(na, na);
    VecX ga(na);
    for (Eigen::Index r = 0; r < na; ++r) {
      ga(r) = g(active[static_cast<size_t>(r)]);
      for (Eigen::Index c = 0; c < na; ++c)
        fa(r, c) = fisher(active[static_cast<size_t>(r)],
                          active[static_cast<size_t>(c)]);
    }
    for (Eigen::Index r = 0; r < na; ++r)
      fa(r, r) += 1e-6 * std::max(fa(r, r), 1.0);
    const VecX da = fa.ldlt().solve(ga);
    FeatureVec dir = FeatureVec::Zero();
    for (Eigen::Index r = 0; r < na; ++r)
      dir(active[static_cast<size_t>(r)]) = da(r);
    if (!dir.allFinite() || dir.dot(g) <= 0.0) dir = g;

    // The gradient drops the maximizer-shift term, so step-halving validates
    // every candidate against the exact objective.
    double alpha = std::min(2.0 * step, 1.0);
    bool accepted = false;
    std::vector<VecX> warm_cand(n);
    std::vector<WindowEval> evals_cand(n);
    for (int bt = 0; bt < 40; ++bt) {
      const FeatureVec w_cand = out.weights + alpha * dir;
      warm_cand = warm;
      const double val_cand = eval_all(w_cand, warm_cand, evals_cand);
      if (val_cand > value && val_cand >= value + 1e-4 * alpha * g.dot(dir)) {
        out.weights = w_cand;
        value = val_cand;
        warm = std::move(warm_cand);
        evals = std::move(evals_cand);
        warm_cand.resize(n);
        evals_cand.resize(n);
        step = alpha;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      out.line_search_failed = true;
      break;
    }
  }

  out.log_likelihood = value;
  return out;
}

namespace {

enum class SeedKind { kField, kBlind, kMirrored };

// Potential-field rollout with the repulsive component kept as-is, removed
// (robot-blind), or reflected across the goal direction — one seed per
// passing-side basin.
VecX response_seed(SeedKind kind, const HumanState& s_h0,
                   const RobotTrajectory& xi_r, const FeatureEnv& env,
                   double accel_max) {
  const int n = xi_r.length();
  const HumanControlBounds bounds{accel_max, kUnbounded};
  PotentialFieldGains blind_gains;
  blind_gains.repulse = 0.0;

  VecX u(2 * n);
  HumanState s = s_h0;
  for (int t = 1; t <= n; ++t) {
    const RobotState& r = xi_r.state(t);
    HumanAction a{};
    switch (kind) {
      case SeedKind::kField:
        a = potential_field_human(s, env.human_goal, r, bounds);
        break;
      case SeedKind::kBlind:
        a = potential_field_human(s, env.human_goal, r, bounds, blind_gains);
        break;
      case SeedKind::kMirrored: {
        const HumanAction field =
            potential_field_human(s, env.human_goal, r, bounds);
        const HumanAction blind =
            potential_field_human(s, env.human_goal, r, bounds, blind_gains);
        const Vec2 rep(field.ax - blind.ax, field.ay - blind.ay);
        Vec2 axis = env.human_goal - s.pos();
        Vec2 mirrored = -rep;  // standing on the goal: just flip
        if (axis.norm() > 1e-9) {
          axis.normalize();
          mirrored = 2.0 * rep.dot(axis) * axis - rep;
        }
        Vec2 acc = Vec2(blind.ax, blind.ay) + mirrored;
        if (acc.norm() > accel_max) acc *= accel_max / acc.norm();
        a = {acc.x(), acc.y()};
        break;
      }
    }
    u(2 * (t - 1)) = a.ax;
    u(2 * (t - 1) + 1) = a.ay;
    s = step_human(s, a, xi_r.dt, unclamped());
  }
  return u;
}

}  // namespace

HumanTrajectory most_likely_response(const FeatureVec& w,
                                     const HumanState& s_h0,
                                     const RobotTrajectory& xi_r,
                                     const FeatureEnv& env, double accel_max,
                                     const AscentOptions& opts,
                                     ResponseStatus* status,
                                     const VecX* warm_start,
                                     ResponseInit init) {
  if (!w.allFinite())
    throw std::invalid_argument("non-finite reward weights");
  const int n = xi_r.length();
  if (n < 1) throw std::invalid_argument("robot trajectory must have steps");
  if (warm_start && warm_start->size() != 2 * n)
    throw std::invalid_argument("warm start has wrong length");

  std::vector<VecX> seeds;
  if (warm_start) seeds.push_back(*warm_start);
  if (!warm_start || init == ResponseInit::kMultiStart)
    seeds.push_back(response_seed(SeedKind::kField, s_h0, xi_r, env, accel_max));
  if (init == ResponseInit::kMultiStart) {
    seeds.push_back(response_seed(SeedKind::kBlind, s_h0, xi_r, env, accel_max));
    seeds.push_back(
        response_seed(SeedKind::kMirrored, s_h0, xi_r, env, accel_max));
  }

  AscentResult best;
  bool have_best = false;
  for (const VecX& u0 : seeds) {
    AscentResult res = maximize_reward(w, s_h0, xi_r.dt, xi_r, env, u0, opts,
                                       block_ball_projection(2, accel_max));
    if (!have_best || res.value > best.value) {
      best = std::move(res);
      have_best = true;
    }
  }

  if (status) {
    status->converged = best.converged;
    status->line_search_failed = best.line_search_failed;
    status->iterations = best.iterations;
    status->grad_norm = best.grad_norm;
  }
  return rebuild(s_h0, xi_r.dt, best.x);
}

HumanTrajectory predict_rollout(const FeatureVec& w, const HumanState& s_h0,
                                const RobotTrajectory& robot_plan,
                                const FeatureEnv& env, int total_steps,
                                int horizon, double accel_max,
                                const AscentOptions& opts) {
  if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");

  HumanTrajectory out;
  out.dt = robot_plan.dt;
  out.start = s_h0;
  out.steps.reserve(static_cast<size_t>(total_steps));

  HumanState s = s_h0;
  VecX warm;
  for (int k = 0; k < total_steps; ++k) {
    const RobotTrajectory window = robot_window(robot_plan, k, horizon);
    const VecX* ws = warm.size() == 2 * horizon ? &warm : nullptr;
    const HumanTrajectory resp =
        most_likely_response(w, s, window, env, accel_max, opts, nullptr, ws,
                             ResponseInit::kMultiStart);

    const HumanAction a = resp.action(1);
    s = step_human(s, a, robot_plan.dt, unclamped());
    out.steps.emplace_back(s, a);

    // Shift the solution one step for the next solve; repeat the tail.
    warm.resize(2 * horizon);
    for (int t = 1; t < horizon; ++t) {
      warm(2 * (t - 1)) = resp.action(t + 1).ax;
      warm(2 * (t - 1) + 1) = resp.action(t + 1).ay;
    }
    warm(2 * (horizon - 1)) = resp.action(horizon).ax;
    warm(2 * (horizon - 1) + 1) = resp.action(horizon).ay;
  }
  return out;
}

double mean_pointwise_error(const HumanTrajectory& a,
                            const HumanTrajectory& b) {
  if (a.length() != b.length() || a.length() < 1)
    throw std::invalid_argument("trajectories must align and have steps");
  double sum = 0.0;
  for (int t = 1; t <= a.length(); ++t)
    sum += (a.state(t).pos() - b.state(t).pos()).norm();
  return sum / a.length();
}

bool passes_left(const HumanTrajectory& xi_h, const RobotTrajectory& xi_r) {
  int best_t = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int t = 0; t <= xi_h.length(); ++t) {
    const int tr = std::min(t, xi_r.length());
    const double d2 =
        (xi_h.state(t).pos() - xi_r.state(tr).pos()).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_t = t;
    }
  }
  const int tr = std::min(best_t, xi_r.length());
  const RobotState& r = xi_r.state(tr);
  const Vec2 left{-std::sin(r.heading), std::cos(r.heading)};
  return (xi_h.state(best_t).pos() - r.pos()).dot(left) >= 0.0;
}

ValidationReport cross_validate(const FeatureVec& w,
                                const std::vector<Demonstration>& held_out,
                                int horizon, double accel_max) {
  if (held_out.empty())
    throw std::invalid_argument("validation needs at least one demonstration");

  // Offline metric: solve the inner predictions tightly so the reported
  // error reflects the model, not the optimizer tolerance.
  AscentOptions opts;
  opts.max_iterations = 1500;
  opts.grad_tolerance = 1e-8;

  ValidationReport report;
  report.entries.reserve(held_out.size());
  for (const Demonstration& d : held_out) {
    const HumanTrajectory pred =
        predict_rollout(w, d.xi_h.start, d.xi_r, d.env, d.xi_h.length(),
                        horizon, accel_max, opts);

    ValidationEntry entry;
    entry.error = mean_pointwise_error(pred, d.xi_h);
    entry.same_side = passes_left(pred, d.xi_r) == passes_left(d.xi_h, d.xi_r);

    report.mean_error += entry.error;
    (entry.same_side ? report.type_one : report.type_two) += 1;
    report.entries.push_back(entry);
  }
  report.mean_error /= static_cast<double>(held_out.size());
  return report;
}

void save_demonstrations(const std::string& path,
                         const std::vector<Demonstration>& demos) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const Demonstration& d : demos) {
    json rec;
    rec["version"] = 1;
    rec["dt"] = d.xi_h.dt;
    rec["label"] = to_string(d.label);
    rec["human_goal"] = {d.env.human_goal.x(), d.env.human_goal.y()};
    rec["obstacles"] = json::array();
    for (const Obstacle& o : d.env.obstacles)
      rec["obstacles"].push_back(
          {{"center", {o.center.x(), o.center.y()}}, {"radius", o.radius}});

    json hsteps = json::array();
    for (int t = 1; t <= d.xi_h.length(); ++t)
      hsteps.push_back({{"t", t * d.xi_h.dt},
                        {"state", state_json(d.xi_h.state(t))},
                        {"control", {d.xi_h.action(t).ax, d.xi_h.action(t).ay}}});
    rec["human"] = {{"start", state_json(d.xi_h.start)}, {"steps", hsteps}};

    json rsteps = json::array();
    for (int t = 1; t <= d.xi_r.length(); ++t)
      rsteps.push_back({{"t", t * d.xi_r.dt},
                        {"state", state_json(d.xi_r.state(t))},
                        {"control",
                         {d.xi_r.action(t).v, d.xi_r.action(t).omega}}});
    rec["robot"] = {{"start", state_json(d.xi_r.start)}, {"steps", rsteps}};

    out << rec.dump() << '\n';
  }
}

std::vector<Demonstration> load_demonstrations(const std::string& path,
                                               const FeatureScales& scales) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  std::vector<Demonstration> demos;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("demonstration file " + path + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }

    Demonstration d;
    const double dt = rec.at("dt").get<double>();
    const std::string label = rec.at("label").get<std::string>();
    if (label == "human_priority") {
      d.label = Intent::kHumanPriority;
    } else if (label == "robot_priority") {
      d.label = Intent::kRobotPriority;
    } else {
      throw std::runtime_error("unknown priority label: " + label);
    }

    d.env.scales = scales;
    d.env.human_goal = {rec.at("human_goal").at(0).get<double>(),
                        rec.at("human_goal").at(1).get<double>()};
    for (const json& o : rec.at("obstacles"))
      d.env.obstacles.push_back(
          {{o.at("center").at(0).get<double>(),
            o.at("center").at(1).get<double>()},
           o.at("radius").get<double>()});

    d.xi_h.dt = dt;
    d.xi_h.start = human_state_from(rec.at("human").at("start"));
    for (const json& s : rec.at("human").at("steps"))
      d.xi_h.steps.emplace_back(
          human_state_from(s.at("state")),
          HumanAction{s.at("control").at(0).get<double>(),
                      s.at("control").at(1).get<double>()});

    d.xi_r.dt = dt;
    d.xi_r.start = robot_state_from(rec.at("robot").at("start"));
    for (const json& s : rec.at("robot").at("steps"))
      d.xi_r.steps.emplace_back(
          robot_state_from(s.at("state")),
          RobotAction{s.at("control").at(0).get<double>(),
                      s.at("control").at(1).get<double>()});

    demos.push_back(std::move(d));
  }
  return demos;
}

void save_mode_weights(const std::string& path, const ModeWeights& weights,
                       const FeatureScales& provenance) {
  json rec;
  rec["version"] = 1;
  rec["features"] = {"velocity", "acceleration", "goal",
                     "obstacle", "avoidance",    "front"};
  rec["human_priority"] = weights_json(weights.human_priority);
  rec["robot_priority"] = weights_json(weights.robot_priority);
  rec["scales"] = scales_json(provenance);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << rec.dump(2) << '\n';
}

ModeWeights load_mode_weights(const std::string& path,
                              FeatureScales* provenance) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  json rec;
  try {
    in >> rec;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("weights file " + path + ": " + e.what());
  }

  ModeWeights w;
  w.human_priority = weights_from(rec.at("human_priority"));
  w.robot_priority = weights_from(rec.at("robot_priority"));
  if (provenance && rec.contains("scales"))
    *provenance = scales_from(rec.at("scales"));
  return w;
}

}  // namespace socnav
