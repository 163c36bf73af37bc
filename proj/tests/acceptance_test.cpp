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
//
// End-to-end acceptance gate. One test per release criterion; each prints a
// single "criterion N [PASS|FAIL]" line on top of the usual gtest output so
// the checklist can be read off a raw log.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "socnav/config.hpp"
#include "socnav/dynamics.hpp"
#include "socnav/features.hpp"
#include "socnav/intent.hpp"
#include "socnav/irl.hpp"
#include "socnav/laplace.hpp"
#include "socnav/planner.hpp"
#include "socnav/sim.hpp"
#include "test_util.hpp"

namespace socnav {
namespace {

using testing::fd_gradient;
using testing::fd_jacobian;
using testing::random_scene;
using testing::rebuild_human;
using testing::relative_error;

// Prints the checklist line when the test scope closes, so early ASSERT
// bail-outs still report.
struct Criterion {
  int index;
  const char* what;
  ~Criterion() {
    std::printf("criterion %2d [%s] %s\n", index,
                ::testing::Test::HasFailure() ? "FAIL" : "PASS", what);
    std::fflush(stdout);
  }
};

PlannerOptions fast_planner() {
  PlannerOptions opts;
  opts.outer.max_iterations = 30;
  opts.outer.grad_tolerance = 3e-4;
  opts.inner.max_iterations = 150;
  opts.inner.grad_tolerance = 1e-5;
  return opts;
}

RobotTrajectory roll(const PlannerScene& s, const VecX& u) {
  return rollout_robot(s.robot_state, unstack_robot_controls(u), s.dt,
                       {1e9, 1e9});
}

double cosine(const FeatureVec& a, const FeatureVec& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

// --------------------------------------------------------------------------
// 1. A fresh signal with uninformative motion yields the closed-form
//    posterior (A e^{-d/M} + 1) / (A e^{-d/M} + 2), relaxing to 1/2.
// --------------------------------------------------------------------------
TEST(Acceptance, SignalDecayMatchesClosedForm) {
  Criterion c{1, "signal-decay posterior matches the closed form"};
  const DecayParams decay;  // A = 8, M = 3
  const CommEvent comm{Intent::kHumanPriority, 2.0};

  const auto posterior = [&](double elapsed) {
    const double t = comm.t_c + elapsed;
    const double eh = explicit_likelihood(comm, Intent::kHumanPriority, t,
                                          decay);
    const double er = explicit_likelihood(comm, Intent::kRobotPriority, t,
                                          decay);
    return combine_evidence(0.0, 0.0, eh, er, IntentBelief{0.5})
        .p_human_priority;
  };

  for (const double elapsed :
       {0.0, decay.time_constant, 5.0 * decay.time_constant}) {
    const double a = decay.amplitude * std::exp(-elapsed / decay.time_constant);
    EXPECT_NEAR(posterior(elapsed), (a + 1.0) / (a + 2.0), 1e-12)
        << "elapsed " << elapsed;
  }
  EXPECT_NEAR(posterior(20.0 * decay.time_constant), 0.5, 1e-3);
}

// --------------------------------------------------------------------------
// 2. Analytic derivatives match finite differences on randomized scenes:
//    reward gradient/Hessian in the human controls, and the planner's
//    expected-reward gradient through the human's re-solved argmax.
// --------------------------------------------------------------------------
TEST(Acceptance, DerivativesMatchFiniteDifferences) {
  Criterion c{2, "analytic derivatives match finite-difference oracles"};
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uw(-2.0, 0.5);

  for (int scene = 0; scene < 20; ++scene) {
    const testing::RandomScene s = random_scene(rng);
    FeatureVec w;
    for (int i = 0; i < kNumFeatures; ++i) w(i) = uw(rng);
    const VecX u0 = stack_controls(s.xi_h);

    const auto reward = [&](const VecX& u) {
      return human_reward(w, rebuild_human(s.xi_h.start, u, s.xi_h.dt),
                          s.xi_r, s.env);
    };
    const VecX grad = grad_human_reward(w, s.xi_h, s.xi_r, s.env);
    EXPECT_LE(relative_error(grad, fd_gradient(reward, u0)), 1e-4)
        << "scene " << scene;

    const auto grad_fn = [&](const VecX& u) {
      return grad_human_reward(w, rebuild_human(s.xi_h.start, u, s.xi_h.dt),
                               s.xi_r, s.env);
    };
    const MatX hess = hessian_human_reward(w, s.xi_h, s.xi_r, s.env);
    EXPECT_LE(relative_error(hess, fd_jacobian(grad_fn, u0)), 1e-3)
        << "scene " << scene;
  }

  // Through-argmax check: the total derivative of the belief-weighted robot
  // objective, chain term through the human response included, against
  // finite differences of the full re-solved objective. Needs very tight
  // inner solves for the differences to be clean; boundary argmaxes are
  // skipped because implicit differentiation assumes an interior optimum.
  std::uniform_real_distribution<double> uv(0.1, 0.6), uomega(-0.4, 0.4),
      jx(-0.8, 0.8), jy(-0.5, 0.5);
  AscentOptions inner;
  inner.max_iterations = 3000;
  inner.grad_tolerance = 1e-11;

  int accepted = 0;
  int attempts = 0;
  while (accepted < 20 && attempts < 60) {
    ++attempts;
    PlannerScene s;
    s.robot_state = {1.0 + jx(rng), 5.0 + jy(rng), 0.2 * jx(rng)};
    s.human_state = {4.0 + jx(rng), 1.5 + jy(rng), 0.2 * jx(rng), 1.0};
    s.robot_goal = {7.5, 5.0};
    s.env.human_goal = {4.0, 9.0};
    s.weights = default_mode_weights();
    VecX u(2 * s.horizon);
    for (int t = 0; t < s.horizon; ++t) {
      u(2 * t) = uv(rng);
      u(2 * t + 1) = uomega(rng);
    }
    const IntentBelief belief{0.6};

    ResponseSet detail;
    expected_reward(u, CommAction::kNone, belief, s, inner, &detail);
    bool interior = true;
    for (const VecX& uh : detail.controls)
      for (int t = 0; t < s.horizon; ++t)
        interior =
            interior && uh.segment<2>(2 * t).norm() < s.human_accel_max - 1e-3;
    if (!interior) continue;
    ++accepted;

    const auto objective = [&](const VecX& ur) {
      return expected_reward(ur, CommAction::kNone, belief, s, inner);
    };
    const VecX got =
        grad_expected_reward(u, CommAction::kNone, belief, s, detail);
    const VecX want = fd_gradient(objective, u, 1e-4);
    EXPECT_LE(relative_error(got, want), 1e-3) << "attempt " << attempts;
  }
  EXPECT_EQ(accepted, 20) << "could not find enough interior-argmax scenes";
}

// --------------------------------------------------------------------------
// 3. On quadratic rewards the curvature-based trajectory integrals are
//    exact: log-partition and observed-motion likelihood against the
//    closed-form Gaussian integral.
// --------------------------------------------------------------------------
TEST(Acceptance, CurvatureIntegralsExactOnQuadratics) {
  Criterion c{3, "curvature integrals match Gaussian closed forms"};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> un(-1.0, 1.0);

  for (int trial = 0; trial < 6; ++trial) {
    const int d = 2 + 2 * trial;
    MatX a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = un(rng);
    const MatX h = -(a.transpose() * a + 0.5 * MatX::Identity(d, d));
    VecX g(d), w_obs(d);
    for (int i = 0; i < d; ++i) {
      g(i) = un(rng);
      w_obs(i) = un(rng);
    }
    const double c0 = un(rng);

    const auto f = [&](const VecX& x) {
      return c0 + g.dot(x) + 0.5 * x.dot(h * x);
    };
    const auto grad = [&](const VecX& x) { return VecX(g + h * x); };

    const Eigen::LLT<MatX> neg((-h).eval());
    const VecX x_star = neg.solve(g);
    const double f_star = c0 + 0.5 * g.dot(x_star);
    const double log_det =
        2.0 * MatX(neg.matrixL()).diagonal().array().log().sum();
    const double log_z =
        f_star + 0.5 * d * std::log(2.0 * M_PI) - 0.5 * log_det;

    EXPECT_NEAR(laplace_log_integral(f_star, h, 1e-6), log_z, 1e-6)
        << "dim " << d;

    // Seed the inner argmax at the known maximizer, as production does with
    // the observed motion; solver convergence from arbitrary starts is the
    // optimizer suite's concern, exactness of the integral is this one's.
    const ImplicitEvidence ev = implicit_likelihood_from_functional(
        f, grad, w_obs, x_star, 1e-6);
    EXPECT_NEAR(ev.log_likelihood, f(w_obs) - log_z, 1e-6) << "dim " << d;
    EXPECT_FALSE(ev.regularized) << "dim " << d;
  }
}

// --------------------------------------------------------------------------
// 4. Weight recovery: trained weights on synthetic windows from known
//    weights point the same way (cosine >= 0.95) and predict held-out
//    windows to within 0.2 m.
// --------------------------------------------------------------------------
TEST(Acceptance, WeightRecoveryFromSyntheticWindows) {
  Criterion c{4, "weight recovery: cosine >= 0.95, held-out error <= 0.2 m"};
  const ScenarioConfig cfg;
  const ModeWeights defaults = default_mode_weights();

  const struct {
    Intent label;
    FeatureVec truth;
    std::uint64_t train_seed, held_seed;
  } regimes[] = {
      {Intent::kHumanPriority, 100.0 * defaults.human_priority, 11, 33},
      {Intent::kRobotPriority, 100.0 * defaults.robot_priority, 22, 44},
  };

  for (const auto& regime : regimes) {
    const auto windows = gen_demonstrations(cfg.features, regime.truth,
                                            regime.label, 200,
                                            regime.train_seed);
    const auto held = gen_demonstrations(cfg.features, regime.truth,
                                         regime.label, 50, regime.held_seed);

    const TrainResult fit =
        train(windows, FeatureVec::Constant(-0.1), TrainOptions{});
    EXPECT_GE(cosine(fit.weights, regime.truth), 0.95)
        << to_string(regime.label);

    const ValidationReport report = cross_validate(
        fit.weights, held, cfg.horizon, cfg.human_limits.accel_max);
    EXPECT_LE(report.mean_error, 0.2) << to_string(regime.label);
  }
}

// --------------------------------------------------------------------------
// 5. Ambiguous crossing, pedestrian-favoring cost regime: the robot signals
//    pedestrian priority within 2 s, slows below half its cruise speed for
//    the crossing, and speeds back up afterwards.
// --------------------------------------------------------------------------
TEST(Acceptance, AmbiguousStartSignalsAndYields) {
  Criterion c{5, "robot signals within 2 s, halves speed, then recovers"};
  ScenarioConfig cfg;
  cfg.robot_start = {0.5, 5.0, 0.0};  // inside the ambiguous start band
  TrialOptions opts;
  opts.scripted_human = true;  // deterministic crossing pedestrian
  opts.max_time = 8.0;

  const TrialRecord rec = run_trial(cfg, default_mode_weights(),
                                    PlannerKind::kCommunicative, 7, opts);

  ASSERT_FALSE(rec.comm_events.empty());
  EXPECT_LE(rec.comm_events.front().t_c, 2.0);
  for (const CommEvent& e : rec.comm_events)
    EXPECT_EQ(e.message, Intent::kHumanPriority) << "at " << e.t_c;

  // Closest-approach tick splits the speed profile into approach/retreat.
  size_t k_min = 0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < rec.robot_states.size(); ++k) {
    const double d =
        (rec.robot_states[k].pos() - rec.human_states[k].pos()).norm();
    if (d < best) {
      best = d;
      k_min = k;
    }
  }
  ASSERT_GT(k_min, 1u);
  ASSERT_LT(k_min, rec.robot_actions.size());

  double cruise = 0.0;  // fastest commanded speed on the approach
  for (size_t k = 0; k < k_min; ++k)
    cruise = std::max(cruise, rec.robot_actions[k].v);
  EXPECT_GE(cruise, 0.9 * cfg.robot_limits.v_max);

  size_t k_cruise = 0;
  while (k_cruise < k_min && rec.robot_actions[k_cruise].v < 0.9 * cruise)
    ++k_cruise;
  double dip = cruise;
  for (size_t k = k_cruise; k < k_min; ++k)
    dip = std::min(dip, rec.robot_actions[k].v);
  EXPECT_LT(dip, 0.5 * cruise);

  double recovered = 0.0;
  for (size_t k = k_min; k < rec.robot_actions.size(); ++k)
    recovered = std::max(recovered, rec.robot_actions[k].v);
  EXPECT_GE(recovered, 0.9 * cruise);

  ASSERT_TRUE(rec.metrics.pass_in_front.has_value());
  EXPECT_TRUE(*rec.metrics.pass_in_front);
}

// --------------------------------------------------------------------------
// 6. Start-position sweep: signal use forms a nonempty contiguous band
//    along the approach axis, silent at both extremes.
// --------------------------------------------------------------------------
TEST(Acceptance, StartSweepShowsSignalBand) {
  Criterion c{6, "15x15 start sweep yields an interior signal band"};
  const ScenarioConfig cfg;
  SweepSpec spec;  // 15x15 over x in [-1, 3]
  // Keep start rows near the corridor: signal use tracks time-to-conflict,
  // so over a wide y spread the band runs diagonally in (x, y) and every
  // column is hit somewhere. Along-axis banding is the claim under test.
  spec.y_min = 4.5;
  spec.y_max = 5.5;
  spec.max_time = 8.0;
  spec.planner = fast_planner();

  const SweepResult sw = sweep_starts(cfg, default_mode_weights(), spec, 1);
  ASSERT_EQ(sw.cells.size(), static_cast<size_t>(spec.nx * spec.ny));
  for (const SweepCell& cell : sw.cells)
    EXPECT_TRUE(cell.ok) << cell.error;

  std::vector<int> used;
  for (int ix = 0; ix < spec.nx; ++ix)
    if (sw.column_used_comm(ix)) used.push_back(ix);

  ASSERT_FALSE(used.empty());
  EXPECT_GT(used.front(), 0) << "band touches the nearest start column";
  EXPECT_LT(used.back(), spec.nx - 1) << "band touches the farthest column";
  for (size_t i = 1; i < used.size(); ++i)
    EXPECT_EQ(used[i], used[i - 1] + 1) << "band has a gap";
}

// --------------------------------------------------------------------------
// 7. Cost-regime contrast: weighting pedestrian comfort over robot
//    efficiency delays the robot's crossing.
// --------------------------------------------------------------------------
TEST(Acceptance, ComfortHeavyRegimeCrossesLater) {
  Criterion c{7, "comfort-heavy cost regime crosses strictly later"};
  const auto crossing_time = [](const ScenarioConfig& cfg) {
    TrialOptions opts;
    opts.scripted_human = true;
    opts.max_time = 14.0;
    const TrialRecord rec = run_trial(cfg, default_mode_weights(),
                                      PlannerKind::kCommunicative, 3, opts);
    for (size_t k = 0; k < rec.robot_states.size(); ++k)
      if (rec.robot_states[k].x >= cfg.human_start.x()) return rec.times[k];
    return std::numeric_limits<double>::infinity();
  };

  const ScenarioConfig comfort_heavy;  // c_comfort : c_efficiency = 2 : 1
  ScenarioConfig efficiency_heavy;
  efficiency_heavy.reward.c_comfort = 1.0;
  efficiency_heavy.reward.c_efficiency = 5.0;

  const double t_comfort = crossing_time(comfort_heavy);
  const double t_efficiency = crossing_time(efficiency_heavy);
  ASSERT_TRUE(std::isfinite(t_comfort));
  ASSERT_TRUE(std::isfinite(t_efficiency));
  EXPECT_GT(t_comfort, t_efficiency);
}

// --------------------------------------------------------------------------
// 8. Condition ordering over 50 paired seeds: intent-consistency
//    communicative >= implicit-only >= baseline, and the pedestrian walks
//    no farther under the communicative planner than under the baseline.
// --------------------------------------------------------------------------
TEST(Acceptance, ConditionOrderingOverFiftySeeds) {
  Criterion c{8, "50-seed ordering: comm >= implicit >= baseline"};
  const ScenarioConfig cfg;
  const ModeWeights weights = default_mode_weights();
  TrialOptions opts;
  opts.max_time = 20.0;
  opts.planner = fast_planner();

  const auto condition = [&](PlannerKind kind) {
    return summarize_batch(run_batch(cfg, weights, kind, 1, 50, opts),
                           Intent::kHumanPriority);
  };
  const BatchSummary comm = condition(PlannerKind::kCommunicative);
  const BatchSummary implicit = condition(PlannerKind::kImplicitOnly);
  const BatchSummary baseline = condition(PlannerKind::kBaseline);

  EXPECT_GE(comm.intent_consistency(), implicit.intent_consistency());
  EXPECT_GE(implicit.intent_consistency(), baseline.intent_consistency());
  EXPECT_LE(comm.mean_human_path, baseline.mean_human_path);
  EXPECT_GT(comm.comm_rate, 0.0);
  EXPECT_EQ(implicit.comm_rate, 0.0);
  EXPECT_EQ(baseline.comm_rate, 0.0);
}

// --------------------------------------------------------------------------
// 9. Planning keeps up with the control clock: full-accuracy plan_step
//    averages under the 0.5 s tick across a 100-tick closed loop.
// --------------------------------------------------------------------------
TEST(Acceptance, PlanningFitsInsideTheControlTick) {
  Criterion c{9, "plan_step 100-tick average under the 0.5 s tick"};
  const ScenarioConfig cfg;
  PlannerScene scene = PlannerScene::from_config(cfg, default_mode_weights());
  const PlannerScene fresh = scene;

  Plan previous;
  bool warm = false;
  double total = 0.0, worst = 0.0;
  for (int tick = 0; tick < 100; ++tick) {
    PlanRequest req;
    req.belief = IntentBelief{0.5};  // ambiguous: all candidates in play
    req.previous = warm ? &previous : nullptr;

    const auto start = std::chrono::steady_clock::now();
    Plan plan = plan_step(scene, req);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    total += seconds;
    worst = std::max(worst, seconds);

    ASSERT_FALSE(plan.controls.empty());
    scene.robot_state = step_robot(scene.robot_state, plan.controls.front(),
                                   scene.dt, scene.robot_limits);
    const HumanTrajectory& response =
        plan.responses.of(Intent::kHumanPriority);
    if (response.length() > 0) scene.human_state = response.state(1);

    const bool robot_done =
        (scene.robot_state.pos() - scene.robot_goal).norm() < 0.5;
    const bool human_done =
        (scene.human_state.pos() - scene.env.human_goal).norm() < 0.5;
    if (robot_done || human_done) {
      scene = fresh;  // restart the encounter, cold
      warm = false;
    } else {
      previous = std::move(plan);
      warm = true;
    }
  }
  const double mean = total / 100.0;
  std::printf("    plan_step over 100 ticks: mean %.3f s, worst %.3f s\n",
              mean, worst);
  EXPECT_LT(mean, 0.5);
}

// --------------------------------------------------------------------------
// 10. Seeded replays through the command-line tool are byte-identical for
//     run, sweep, and batch.
// --------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in.is_open()) << path;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(Acceptance, CommandLineReplaysAreByteIdentical) {
  Criterion c{10, "seeded run/sweep/batch replays are byte-identical"};
  const std::string cli = SOCNAV_CLI_PATH;
  ASSERT_TRUE(std::filesystem::exists(cli)) << cli;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "socnav_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  const auto shell = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " >/dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0) << cmd;
  };

  for (const char* pass : {"1", "2"}) {
    const std::string d = (dir / pass).string();
    std::filesystem::create_directories(d);
    shell("run --planner baseline --seed 7 --out " + d + "/trial.jsonl" +
          " --csv " + d + "/trial.csv");
    shell("sweep --nx 5 --ny 2 --y-min 4.75 --y-max 5.25 --max-time 8"
          " --seed 3 --out " + d + "/sweep.csv");
    shell("batch -n 2 --seed 5 --max-time 10 --out " + d + "/batch");
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir / "1"))
    if (entry.is_regular_file()) files.push_back(entry.path());
  ASSERT_GE(files.size(), 10u);  // trial x2, sweep, batch summary + 6 traces

  for (const auto& first : files) {
    const auto second =
        dir / "2" / std::filesystem::relative(first, dir / "1");
    const std::string a = slurp(first), b = slurp(second);
    EXPECT_FALSE(a.empty()) << first;
    EXPECT_EQ(a, b) << "replay diverged: " << first;
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace socnav
