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

#include "socnav/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "socnav/laplace.hpp"

namespace socnav {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kPassInFrontGuard = 3.0;  // m, closest-approach validity
constexpr double kFarAway = 1.0e6;         // parked phantom for absent robots

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d4a2c592cbdf05ull;
  return x ^ (x >> 31);
}

RobotTrajectory hold_trajectory(const RobotState& s, int n, double dt) {
  return rollout_robot(
      s, std::vector<RobotAction>(static_cast<size_t>(n), RobotAction{}), dt);
}

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ordered_json json_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json metrics_json(const Metrics& m) {
  ordered_json j;
  j["human_path_length"] = m.human_path_length;
  j["robot_path_length"] = m.robot_path_length;
  j["pass_in_front"] =
      m.pass_in_front ? ordered_json(*m.pass_in_front) : ordered_json(nullptr);
  if (!m.pass_in_front) j["pass_in_front_reason"] = m.pass_in_front_reason;
  j["min_distance"] = json_or_null(m.min_distance);
  j["comm_count"] = m.comm_count;
  j["comm_times"] = m.comm_times;
  j["duration"] = m.duration;
  j["human_arrival"] = m.human_arrival ? ordered_json(*m.human_arrival)
                                       : ordered_json(nullptr);
  j["robot_arrival"] = m.robot_arrival ? ordered_json(*m.robot_arrival)
                                       : ordered_json(nullptr);
  return j;
}

}  // namespace

const char* to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kCommunicative:
      return "comm";
    case PlannerKind::kImplicitOnly:
      return "implicit";
    default:
      return "baseline";
  }
}

PlannerKind planner_kind_from_string(const std::string& name) {
  if (name == "comm" || name == "communicative")
    return PlannerKind::kCommunicative;
  if (name == "implicit" || name == "implicit-only")
    return PlannerKind::kImplicitOnly;
  if (name == "baseline") return PlannerKind::kBaseline;
  throw std::invalid_argument("unknown planner kind '" + name +
                              "' (expected comm, implicit, or baseline)");
}

std::uint64_t trial_seed(std::uint64_t base, int index) {
  return splitmix64(base + splitmix64(static_cast<std::uint64_t>(index) + 1));
}

bool should_resample(const IntentBelief& belief, Intent current, double t,
                     double last_switch, const SimParams& params) {
  return belief.p(current) < params.switch_threshold &&
         t - last_switch >= params.switch_hysteresis;
}

SimulatedHuman::SimulatedHuman(const ModeWeights& weights,
                               const FeatureEnv& env, const DecayParams& decay,
                               const IntentParams& intent, const SimParams& sim,
                               const HumanControlBounds& bounds,
                               const IntentBelief& prior, std::uint64_t seed)
    : weights_(weights),
      env_(env),
      decay_(decay),
      intent_(intent),
      sim_(sim),
      bounds_(bounds),
      prior_(prior),
      belief_(prior),
      rng_(seed) {
  if (!prior_.valid()) throw std::invalid_argument("invalid belief prior");
  if (!(sim_.noise_std >= 0.0))
    throw std::invalid_argument("noise std must be >= 0");
  response_opts_.max_iterations = 300;
  response_opts_.grad_tolerance = 1e-6;
  mode_ = unit_(rng_) < prior_.p_human_priority ? Intent::kHumanPriority
                                                : Intent::kRobotPriority;
}

const IntentBelief& SimulatedHuman::update_belief(
    const RobotTrajectory& xi_r_hist, const HumanTrajectory& xi_h_hist,
    const std::optional<CommEvent>& comm, double t) {
  if (xi_r_hist.length() < 1 || xi_h_hist.length() < 1) {
    belief_ = prior_;
    diag_ = {};
    return belief_;
  }
  belief_ = intent_posterior(comm, xi_r_hist, xi_h_hist, t, env_.scales,
                             decay_, intent_, prior_, &diag_);
  return belief_;
}

HumanAction SimulatedHuman::act(const HumanState& s,
                                const RobotTrajectory& announced, double t,
                                bool* used_fallback) {
  if (used_fallback) *used_fallback = false;
  if (should_resample(belief_, mode_, t, last_switch_, sim_)) {
    mode_ = unit_(rng_) < belief_.p_human_priority ? Intent::kHumanPriority
                                                   : Intent::kRobotPriority;
    last_switch_ = t;
  }

  HumanAction u{};
  bool ok = false;
  try {
    const HumanTrajectory resp =
        most_likely_response(weights_.of(mode_), s, announced, env_,
                             bounds_.accel_max, response_opts_);
    if (resp.length() >= 1 && resp.action(1).finite()) {
      u = resp.action(1);
      ok = true;
    }
  } catch (const std::exception&) {
    ok = false;
  }
  if (!ok) {
    u = potential_field_human(s, env_.human_goal, announced.start, bounds_);
    if (used_fallback) *used_fallback = true;
  }

  if (sim_.noise_std > 0.0) {
    u.ax += sim_.noise_std * normal_(rng_);
    u.ay += sim_.noise_std * normal_(rng_);
  }
  const double mag = u.magnitude();
  if (mag > bounds_.accel_max) {
    const double sc = bounds_.accel_max / mag;
    u.ax *= sc;
    u.ay *= sc;
  }
  return u;
}

namespace {

void finalize_metrics(TrialRecord& rec, const TrialOptions& opts) {
  Metrics& m = rec.metrics;
  const int last = static_cast<int>(rec.times.size()) - 1;
  const auto arrival_tick = [&](const std::optional<double>& t) {
    return t ? static_cast<int>(std::llround(*t / rec.dt)) : last;
  };

  const int h_end = arrival_tick(m.human_arrival);
  for (int k = 0; k < h_end; ++k)
    m.human_path_length += (rec.human_states[static_cast<size_t>(k + 1)].pos() -
                            rec.human_states[static_cast<size_t>(k)].pos())
                               .norm();
  const int r_end = arrival_tick(m.robot_arrival);
  for (int k = 0; k < r_end; ++k)
    m.robot_path_length += (rec.robot_states[static_cast<size_t>(k + 1)].pos() -
                            rec.robot_states[static_cast<size_t>(k)].pos())
                               .norm();

  if (opts.robot_present && opts.human_present) {
    for (size_t k = 0; k < rec.times.size(); ++k)
      m.min_distance = std::min(
          m.min_distance,
          (rec.human_states[k].pos() - rec.robot_states[k].pos()).norm());
    const PassInFront flag = pass_in_front(rec);
    m.pass_in_front = flag.in_front;
    m.pass_in_front_reason = flag.reason;
  } else {
    m.pass_in_front_reason = "an agent is absent";
  }

  m.comm_count = static_cast<int>(rec.comm_events.size());
  for (const CommEvent& e : rec.comm_events) m.comm_times.push_back(e.t_c);
}

}  // namespace

TrialRecord run_trial(const ScenarioConfig& cfg, const ModeWeights& weights,
                      PlannerKind kind, std::uint64_t seed,
                      const TrialOptions& opts) {
  cfg.validate();
  if (!opts.prior.valid()) throw std::invalid_argument("invalid belief prior");
  const double dt = cfg.dt;
  const double max_time = opts.max_time > 0.0
                              ? std::min(opts.max_time, cfg.sim.timeout)
                              : cfg.sim.timeout;
  const double tol = cfg.sim.goal_tolerance;

  const FeatureEnv env = FeatureEnv::from_config(cfg);
  SimulatedHuman human(weights, env, cfg.decay, cfg.intent, cfg.sim,
                       cfg.human_limits, opts.prior, seed);

  TrialRecord rec;
  rec.planner = kind;
  rec.seed = seed;
  rec.dt = dt;

  RobotState xr = cfg.robot_start;
  HumanState xh{cfg.human_start.x(), cfg.human_start.y(), 0.0, 0.0};
  Vec2 scripted_dir = cfg.human_goal - cfg.human_start;
  const double scripted_len = scripted_dir.norm();
  scripted_dir = scripted_len > 1e-12 ? Vec2(scripted_dir / scripted_len)
                                      : Vec2(0.0, 0.0);
  if (opts.scripted_human) {
    // The scripted pedestrian is already walking when the trial starts.
    xh.vx = scripted_dir.x() * cfg.sim.scripted_speed;
    xh.vy = scripted_dir.y() * cfg.sim.scripted_speed;
  }

  RobotTrajectory xi_r_hist;
  xi_r_hist.dt = dt;
  xi_r_hist.start = xr;
  HumanTrajectory xi_h_hist;
  xi_h_hist.dt = dt;
  xi_h_hist.start = xh;

  PlannerScene scene = PlannerScene::from_config(cfg, weights);
  std::optional<Plan> current, pending;

  for (int k = 0;; ++k) {
    const double t = k * dt;
    rec.times.push_back(t);
    rec.robot_states.push_back(xr);
    rec.human_states.push_back(xh);

    if (opts.robot_present && !rec.metrics.robot_arrival &&
        (xr.pos() - cfg.robot_goal).norm() <= tol)
      rec.metrics.robot_arrival = t;
    if (opts.human_present && !rec.metrics.human_arrival &&
        (xh.pos() - cfg.human_goal).norm() <= tol)
      rec.metrics.human_arrival = t;
    const bool r_done = !opts.robot_present || rec.metrics.robot_arrival;
    const bool h_done = !opts.human_present || rec.metrics.human_arrival;
    if (r_done && h_done) {
      rec.metrics.duration = t;
      break;
    }
    if (t >= max_time - 1e-9 ||
        (opts.stop_after_comm && !rec.comm_events.empty())) {
      rec.incomplete = true;
      rec.metrics.duration = t;
      break;
    }

    // Adopt the plan computed during the previous tick; its signal, if any,
    // fires now, as execution starts.
    PlanDiag diag;
    if (pending) {
      current = std::move(*pending);
      pending.reset();
      diag.comm = current->comm;
      diag.expected_reward = current->expected_reward;
      diag.iterations = current->iterations;
      diag.converged = current->converged;
      diag.fallback = current->fallback;
      diag.warmup = false;
      if (current->comm != CommAction::kNone)
        rec.comm_events.push_back({comm_intent(current->comm), t});
    }
    rec.plans.push_back(diag);

    const RobotAction u_r =
        opts.robot_present && current && !current->controls.empty()
            ? current->controls.front()
            : RobotAction{};

    // One belief serves both sides: the pedestrian model updates it from the
    // robot's executed motion and signals, and the planner reads it back.
    std::optional<CommEvent> latest;
    if (!rec.comm_events.empty()) latest = rec.comm_events.back();
    IntentBelief belief = opts.prior;
    if (opts.robot_present && opts.human_present)
      belief = human.update_belief(xi_r_hist, xi_h_hist, latest, t);
    rec.belief.push_back(belief.p_human_priority);
    rec.human_mode.push_back(human.mode());

    // Pedestrian action.
    HumanAction u_h{};
    HumanState xh_next = xh;
    if (opts.human_present && opts.scripted_human) {
      // Kinematic replay: straight to the goal at the scripted speed,
      // regardless of the robot. Recorded actions are the implied
      // accelerations.
      const Vec2 to_goal = cfg.human_goal - xh.pos();
      const double d = to_goal.norm();
      const double step_len = cfg.sim.scripted_speed * dt;
      Vec2 next_pos, next_vel;
      if (d <= step_len || d <= 1e-12) {
        next_pos = cfg.human_goal;
        next_vel = Vec2(0.0, 0.0);
      } else {
        const Vec2 dir = to_goal / d;
        next_pos = xh.pos() + dir * step_len;
        next_vel = dir * cfg.sim.scripted_speed;
      }
      u_h = {(next_vel.x() - xh.vx) / dt, (next_vel.y() - xh.vy) / dt};
      xh_next = {next_pos.x(), next_pos.y(), next_vel.x(), next_vel.y()};
    } else if (opts.human_present) {
      RobotTrajectory announced;
      if (!opts.robot_present) {
        announced = hold_trajectory(RobotState{kFarAway, kFarAway, 0.0},
                                    cfg.horizon, dt);
      } else if (current &&
                 static_cast<int>(current->controls.size()) == cfg.horizon) {
        announced = rollout_robot(xr, current->controls, dt, cfg.robot_limits);
      } else {
        announced = hold_trajectory(xr, cfg.horizon, dt);
      }
      bool fb = false;
      u_h = human.act(xh, announced, t, &fb);
      if (fb) rec.human_fallback_ticks.push_back(k);
      xh_next = step_human(xh, u_h, dt, cfg.human_limits);
    }

    // Plan for the next tick from this tick's observations.
    if (opts.robot_present) {
      scene.robot_state = xr;
      scene.human_state = xh;
      scene.human_present = opts.human_present;
      if (kind == PlannerKind::kBaseline) {
        // Same one-tick compute latency as the full planner, but the
        // pedestrian stays a static obstacle: the baseline does not predict.
        PlannerScene comp = scene;
        comp.robot_state = step_robot(xr, u_r, dt, cfg.robot_limits);
        pending = baseline_plan(comp, opts.planner);
      } else {
        PlanRequest req;
        req.belief = belief;
        req.previous = current ? &*current : nullptr;
        req.compensate_latency = true;
        req.allow_comm = kind == PlannerKind::kCommunicative;
        pending = plan_step(scene, req, opts.planner);
      }
    }

    // Step the world.
    if (opts.robot_present) xr = step_robot(xr, u_r, dt, cfg.robot_limits);
    xh = xh_next;
    rec.robot_actions.push_back(u_r);
    rec.human_actions.push_back(u_h);
    xi_r_hist.steps.emplace_back(xr, u_r);
    xi_h_hist.steps.emplace_back(xh, u_h);
  }

  finalize_metrics(rec, opts);
  return rec;
}

PassInFront pass_in_front(const std::vector<RobotState>& robot,
                          const std::vector<HumanState>& human) {
  if (robot.size() != human.size() || robot.empty())
    return {std::nullopt, "trajectories missing or misaligned"};
  int best = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < robot.size(); ++k) {
    const double d = (human[k].pos() - robot[k].pos()).norm();
    if (d < dmin) {
      dmin = d;
      best = static_cast<int>(k);
    }
  }
  if (dmin > kPassInFrontGuard)
    return {std::nullopt, "agents never came within 3 m"};
  const size_t b = static_cast<size_t>(best);
  const double along = (human[b].pos() - robot[b].pos())
                           .dot(robot[b].heading_vec());
  return {along > 0.0, ""};
}

PassInFront pass_in_front(const TrialRecord& record) {
  return pass_in_front(record.robot_states, record.human_states);
}

bool SweepResult::column_used_comm(int ix) const {
  for (int iy = 0; iy < spec.ny; ++iy) {
    const SweepCell& c = at(ix, iy);
    if (c.ok && c.comm_used) return true;
  }
  return false;
}

SweepResult sweep_starts(const ScenarioConfig& cfg, const ModeWeights& weights,
                         const SweepSpec& spec, std::uint64_t seed) {
  if (spec.nx < 1 || spec.ny < 1)
    throw std::invalid_argument("sweep grid must be at least 1x1");
  if (!(spec.x_min <= spec.x_max) || !(spec.y_min <= spec.y_max))
    throw std::invalid_argument("sweep grid bounds are inverted");

  SweepResult out;
  out.spec = spec;
  out.cells.resize(static_cast<size_t>(spec.nx) *
                   static_cast<size_t>(spec.ny));

  TrialOptions topts;
  topts.scripted_human = true;
  topts.max_time = spec.max_time;
  topts.stop_after_comm = spec.stop_on_comm;
  topts.planner = spec.planner;

  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      const int idx = iy * spec.nx + ix;
      const double x =
          spec.nx == 1 ? spec.x_min
                       : spec.x_min + (spec.x_max - spec.x_min) * ix /
                                          (spec.nx - 1);
      const double y =
          spec.ny == 1 ? spec.y_min
                       : spec.y_min + (spec.y_max - spec.y_min) * iy /
                                          (spec.ny - 1);
      SweepCell cell;
      cell.start = Vec2(x, y);
      ScenarioConfig c = cfg;
      const Vec2 to_goal = c.robot_goal - cell.start;
      const double heading =
          to_goal.norm() > 1e-12 ? std::atan2(to_goal.y(), to_goal.x()) : 0.0;
      c.robot_start = RobotState{x, y, heading};
      try {
        const TrialRecord r =
            run_trial(c, weights, PlannerKind::kCommunicative,
                      trial_seed(seed, idx), topts);
        cell.ok = true;
        cell.comm_used = !r.comm_events.empty();
        if (cell.comm_used) {
          cell.first_comm = r.comm_events.front().message ==
                                    Intent::kHumanPriority
                                ? CommAction::kHumanPriority
                                : CommAction::kRobotPriority;
          cell.first_comm_time = r.comm_events.front().t_c;
        }
        cell.metrics = r.metrics;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      out.cells[static_cast<size_t>(idx)] = cell;
    }
  }
  return out;
}

std::vector<TrialRecord> run_batch(const ScenarioConfig& cfg,
                                   const ModeWeights& weights,
                                   PlannerKind kind, std::uint64_t base_seed,
                                   int n, const TrialOptions& opts) {
  if (n < 0) throw std::invalid_argument("batch size must be >= 0");
  std::vector<TrialRecord> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    out.push_back(run_trial(cfg, weights, kind, trial_seed(base_seed, i),
                            opts));
  return out;
}

BatchSummary summarize_batch(const std::vector<TrialRecord>& records,
                             Intent expected) {
  BatchSummary s;
  s.n = static_cast<int>(records.size());
  if (records.empty()) return s;

  double sum_h = 0.0, sum_h2 = 0.0, sum_r = 0.0, sum_r2 = 0.0;
  double sum_d = 0.0, sum_t = 0.0, sum_c = 0.0;
  for (const TrialRecord& r : records) {
    const Metrics& m = r.metrics;
    sum_h += m.human_path_length;
    sum_h2 += m.human_path_length * m.human_path_length;
    sum_r += m.robot_path_length;
    sum_r2 += m.robot_path_length * m.robot_path_length;
    sum_d += m.min_distance;
    sum_t += m.duration;
    sum_c += m.comm_count;
    if (r.incomplete) ++s.incomplete;
    if (!m.pass_in_front) {
      ++s.undefined;
    } else if (*m.pass_in_front == (expected == Intent::kHumanPriority)) {
      ++s.consistent;
    } else {
      ++s.inconsistent;
    }
  }
  const double n = static_cast<double>(s.n);
  s.mean_human_path = sum_h / n;
  s.std_human_path =
      std::sqrt(std::max(0.0, sum_h2 / n - s.mean_human_path *
                                               s.mean_human_path));
  s.mean_robot_path = sum_r / n;
  s.std_robot_path =
      std::sqrt(std::max(0.0, sum_r2 / n - s.mean_robot_path *
                                               s.mean_robot_path));
  s.mean_min_distance = sum_d / n;
  s.mean_duration = sum_t / n;
  s.comm_rate = sum_c / n;
  return s;
}

std::vector<Demonstration> gen_demonstrations(const FeatureScales& scales,
                                              const FeatureVec& w_true,
                                              Intent label, int count,
                                              std::uint64_t seed,
                                              double temperature, int horizon,
                                              double dt) {
  if (count < 0) throw std::invalid_argument("count must be >= 0");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(temperature >= 0.0))
    throw std::invalid_argument("temperature must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> hx(1.5, 6.5), hy(0.5, 3.0),
      lateral(-1.2, 1.2), ahead(1.2, 3.0), rx_off(-2.0, 2.0), rv(0.25, 0.6),
      rw(-0.3, 0.3), obs_side(0.5, 1.1), obs_r(0.2, 0.4), coin(0.0, 1.0);
  std::normal_distribution<double> vjit(0.0, 0.4), unit(0.0, 1.0);
  const HumanControlBounds wide_h{1e9, 1e9};
  const RobotControlBounds wide_r{1e9, 1e9};

  AscentOptions opts;
  opts.max_iterations = 600;
  opts.grad_tolerance = 1e-8;

  std::vector<Demonstration> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    // Pedestrian walking roughly +y toward a goal; robot ahead, crossing
    // back over its path, so the social features carry signal.
    const HumanState h0{hx(rng), hy(rng), 0.4 * vjit(rng), 1.0 + vjit(rng)};
    FeatureEnv env;
    env.scales = scales;
    env.human_goal = Vec2(h0.x + lateral(rng), h0.y + 6.0);

    const double rxo = rx_off(rng);
    const RobotState r0{h0.x + rxo, h0.y + ahead(rng),
                        (rxo >= 0.0 ? M_PI : 0.0) + rw(rng)};
    std::vector<RobotAction> ru(static_cast<size_t>(horizon));
    for (auto& a : ru) a = {rv(rng), rw(rng)};
    const RobotTrajectory xi_r = rollout_robot(r0, ru, dt, wide_r);

    // Every other window carries an obstacle beside the walking line; the
    // obstacle weight is unidentifiable from obstacle-free data alone.
    if (i % 2 == 0) {
      const Vec2 mid = 0.5 * (h0.pos() + env.human_goal);
      const double side = coin(rng) < 0.5 ? -1.0 : 1.0;
      env.obstacles.push_back(
          {mid + Vec2(side * obs_side(rng), 0.0), obs_r(rng)});
    }

    const HumanTrajectory resp =
        most_likely_response(w_true, h0, xi_r, env, 1.5, opts, nullptr,
                             nullptr, ResponseInit::kMultiStart);

    // Draw controls from the model's own local Gaussian around the most
    // likely response: u* + sqrt(T)·(−H)^{-1/2}·z, re-clamped to the ball.
    MatX hess = hessian_human_reward(w_true, resp, xi_r, env);
    clamp_negative_definite(hess, 1e-3);
    const Eigen::LLT<MatX> neg((MatX(-hess)));
    VecX z(2 * horizon);
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = unit(rng);
    VecX u = stack_controls(resp) +
             std::sqrt(temperature) * neg.matrixU().solve(z);
    u = block_ball_projection(2, 1.5)(u);

    const HumanTrajectory xi_h =
        rollout_human(h0, unstack_human_controls(u), dt, wide_h);
    out.push_back({xi_h, xi_r, env, label});
  }
  return out;
}

std::string trial_to_jsonl(const TrialRecord& rec) {
  std::string out;
  ordered_json header;
  header["type"] = "header";
  header["format"] = "socnav-trace";
  header["version"] = 1;
  header["planner"] = to_string(rec.planner);
  header["seed"] = rec.seed;
  header["dt"] = rec.dt;
  out += header.dump();
  out += '\n';

  for (size_t k = 0; k < rec.robot_actions.size(); ++k) {
    const RobotState& r = rec.robot_states[k];
    const HumanState& h = rec.human_states[k];
    ordered_json j;
    j["type"] = "tick";
    j["k"] = k;
    j["t"] = rec.times[k];
    j["robot"] = {r.x, r.y, r.heading};
    j["human"] = {h.x, h.y, h.vx, h.vy};
    j["belief"] = rec.belief[k];
    j["mode"] = to_string(rec.human_mode[k]);
    j["u_r"] = {rec.robot_actions[k].v, rec.robot_actions[k].omega};
    j["u_h"] = {rec.human_actions[k].ax, rec.human_actions[k].ay};
    const PlanDiag& p = rec.plans[k];
    ordered_json pj;
    pj["comm"] = to_string(p.comm);
    pj["value"] = p.warmup ? ordered_json(nullptr)
                           : json_or_null(p.expected_reward);
    pj["iterations"] = p.iterations;
    pj["converged"] = p.converged;
    pj["fallback"] = p.fallback;
    pj["warmup"] = p.warmup;
    j["plan"] = pj;
    out += j.dump();
    out += '\n';
  }

  {
    const RobotState& r = rec.robot_states.back();
    const HumanState& h = rec.human_states.back();
    ordered_json j;
    j["type"] = "final";
    j["t"] = rec.times.back();
    j["robot"] = {r.x, r.y, r.heading};
    j["human"] = {h.x, h.y, h.vx, h.vy};
    out += j.dump();
    out += '\n';
  }

  ordered_json footer;
  footer["type"] = "summary";
  footer["incomplete"] = rec.incomplete;
  ordered_json events = ordered_json::array();
  for (const CommEvent& e : rec.comm_events) {
    ordered_json ev;
    ev["message"] = to_string(e.message);
    ev["t"] = e.t_c;
    events.push_back(ev);
  }
  footer["comm_events"] = events;
  footer["human_fallbacks"] = rec.human_fallback_ticks.size();
  footer["metrics"] = metrics_json(rec.metrics);
  out += footer.dump();
  out += '\n';
  return out;
}

std::string trial_to_csv(const TrialRecord& rec) {
  std::string out = "# socnav-trace-csv v1\n";
  out +=
      "t,robot_x,robot_y,robot_heading,human_x,human_y,human_vx,human_vy,"
      "belief_human,mode,comm,u_v,u_omega,u_ax,u_ay\n";
  for (size_t k = 0; k < rec.robot_actions.size(); ++k) {
    const RobotState& r = rec.robot_states[k];
    const HumanState& h = rec.human_states[k];
    out += fmt(rec.times[k]) + ',' + fmt(r.x) + ',' + fmt(r.y) + ',' +
           fmt(r.heading) + ',' + fmt(h.x) + ',' + fmt(h.y) + ',' +
           fmt(h.vx) + ',' + fmt(h.vy) + ',' + fmt(rec.belief[k]) + ',' +
           to_string(rec.human_mode[k]) + ',' + to_string(rec.plans[k].comm) +
           ',' + fmt(rec.robot_actions[k].v) + ',' +
           fmt(rec.robot_actions[k].omega) + ',' +
           fmt(rec.human_actions[k].ax) + ',' + fmt(rec.human_actions[k].ay) +
           '\n';
  }
  return out;
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out = "# socnav-sweep-csv v1\n";
  out +=
      "ix,iy,x,y,ok,comm_used,comm,comm_time,min_distance,robot_path,"
      "human_path,duration,error\n";
  for (int iy = 0; iy < sweep.spec.ny; ++iy) {
    for (int ix = 0; ix < sweep.spec.nx; ++ix) {
      const SweepCell& c = sweep.at(ix, iy);
      std::string error = c.error;
      std::replace(error.begin(), error.end(), ',', ';');
      std::replace(error.begin(), error.end(), '\n', ' ');
      out += std::to_string(ix) + ',' + std::to_string(iy) + ',' +
             fmt(c.start.x()) + ',' + fmt(c.start.y()) + ',' +
             (c.ok ? "1" : "0") + ',' + (c.comm_used ? "1" : "0") + ',' +
             (c.comm_used ? to_string(c.first_comm) : "none") + ',' +
             (c.comm_used ? fmt(c.first_comm_time) : "") + ',' +
             (c.ok ? fmt(c.metrics.min_distance) : "") + ',' +
             (c.ok ? fmt(c.metrics.robot_path_length) : "") + ',' +
             (c.ok ? fmt(c.metrics.human_path_length) : "") + ',' +
             (c.ok ? fmt(c.metrics.duration) : "") + ',' + error + '\n';
    }
  }
  return out;
}

std::string batch_summary_table(
    const std::vector<std::pair<std::string, BatchSummary>>& rows) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %4s %12s %12s %10s %9s %10s %12s\n",
                "condition", "n", "human_path", "robot_path", "min_dist",
                "comms", "duration", "consistency");
  out += line;
  for (const auto& [name, s] : rows) {
    char hp[32], rp[32];
    std::snprintf(hp, sizeof(hp), "%.2f(%.2f)", s.mean_human_path,
                  s.std_human_path);
    std::snprintf(rp, sizeof(rp), "%.2f(%.2f)", s.mean_robot_path,
                  s.std_robot_path);
    std::snprintf(line, sizeof(line),
                  "%-12s %4d %12s %12s %10.2f %9.2f %10.2f %8d/%-3d\n",
                  name.c_str(), s.n, hp, rp, s.mean_min_distance, s.comm_rate,
                  s.mean_duration, s.consistent,
                  s.consistent + s.inconsistent);
    out += line;
  }
  return out;
}

void save_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace socnav
