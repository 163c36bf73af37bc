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

#ifndef SOCNAV_SIM_H_
#define SOCNAV_SIM_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "socnav/config.hpp"
#include "socnav/dynamics.hpp"
#include "socnav/intent.hpp"
#include "socnav/irl.hpp"
#include "socnav/planner.hpp"
#include "socnav/types.hpp"

namespace socnav {

/// Robot planning policy used in a trial. The implicit-only planner is the
/// full planner with the signal set restricted to {none}; the baseline avoids
/// the human's current position without predicting it.
enum class PlannerKind { kCommunicative, kImplicitOnly, kBaseline };

const char* to_string(PlannerKind kind);
/// Accepts "comm", "implicit", "baseline" (CLI spellings). Throws otherwise.
PlannerKind planner_kind_from_string(const std::string& name);

/// Deterministic per-trial seed stream: mixes a base seed with the trial
/// index so batches are reproducible and trials pairwise independent.
std::uint64_t trial_seed(std::uint64_t base, int index);

/// Pure mode-switch rule: re-sample whenever the belief mass on the current
/// mode falls below the threshold, rate-limited by the hysteresis window.
bool should_resample(const IntentBelief& belief, Intent current, double t,
                     double last_switch, const SimParams& params);

/// Model-driven pedestrian: maintains an intent belief from the robot's
/// executed motion and signals, samples a behavior mode from it (with
/// hysteresis against chattering), and answers the robot's announced
/// trajectory with the sampled mode's most likely response plus control
/// noise. Also serves as the belief engine for the planner, which assumes
/// it observes the pedestrian's belief exactly.
class SimulatedHuman {
 public:
  SimulatedHuman(const ModeWeights& weights, const FeatureEnv& env,
                 const DecayParams& decay, const IntentParams& intent,
                 const SimParams& sim, const HumanControlBounds& bounds,
                 const IntentBelief& prior, std::uint64_t seed);

  /// Recomputes the belief from the executed histories (trailing window) and
  /// the latest signal. Histories with no steps yet leave the prior in place.
  const IntentBelief& update_belief(const RobotTrajectory& xi_r_hist,
                                    const HumanTrajectory& xi_h_hist,
                                    const std::optional<CommEvent>& comm,
                                    double t);

  /// One control: maybe re-sample the mode, then respond to the announced
  /// robot trajectory. Falls back to a potential-field action (flagged) when
  /// the response optimization returns garbage.
  HumanAction act(const HumanState& s, const RobotTrajectory& announced,
                  double t, bool* used_fallback = nullptr);

  const IntentBelief& belief() const { return belief_; }
  Intent mode() const { return mode_; }
  const PosteriorDiagnostics& diagnostics() const { return diag_; }

 private:
  ModeWeights weights_;
  FeatureEnv env_;
  DecayParams decay_;
  IntentParams intent_;
  SimParams sim_;
  HumanControlBounds bounds_;
  IntentBelief prior_;
  IntentBelief belief_;
  PosteriorDiagnostics diag_;
  Intent mode_ = Intent::kHumanPriority;
  double last_switch_ = -std::numeric_limits<double>::infinity();
  AscentOptions response_opts_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// Per-tick record of the plan that started executing at that tick.
struct PlanDiag {
  CommAction comm = CommAction::kNone;
  double expected_reward = 0.0;
  int iterations = 0;
  bool converged = false;
  bool fallback = false;
  bool warmup = true;  // no plan ready yet (first tick)
};

struct Metrics {
  double human_path_length = 0.0;
  double robot_path_length = 0.0;
  std::optional<bool> pass_in_front;  // human ahead of the robot at closest
  std::string pass_in_front_reason;   // set when the flag is undefined
  double min_distance = std::numeric_limits<double>::infinity();
  int comm_count = 0;
  std::vector<double> comm_times;
  double duration = 0.0;
  std::optional<double> human_arrival;
  std::optional<double> robot_arrival;
};

/// Everything one closed-loop trial produced. States span ticks 0..K, the
/// per-tick vectors span 0..K-1 (the actions taken between states).
struct TrialRecord {
  PlannerKind planner = PlannerKind::kCommunicative;
  std::uint64_t seed = 0;
  double dt = 0.5;
  std::vector<double> times;  // K+1 stamps, strictly increasing by dt
  std::vector<RobotState> robot_states;
  std::vector<HumanState> human_states;
  std::vector<RobotAction> robot_actions;
  std::vector<HumanAction> human_actions;
  std::vector<double> belief;      // p(human priority) used at each tick
  std::vector<Intent> human_mode;  // sampled behavior mode in effect
  std::vector<PlanDiag> plans;
  std::vector<CommEvent> comm_events;
  std::vector<int> human_fallback_ticks;
  bool incomplete = false;  // timed out before both agents arrived
  Metrics metrics;
};

struct TrialOptions {
  bool human_present = true;
  bool robot_present = true;
  /// Replay a fixed straight-to-goal pedestrian (deterministic regardless of
  /// the robot) instead of the model-driven one.
  bool scripted_human = false;
  /// Caps simulated time below the configured timeout (sweeps only need the
  /// opening of the interaction). Non-positive means use the config timeout.
  double max_time = 0.0;
  /// Ends the trial one tick after the first signal fires (flagged
  /// incomplete). Start sweeps only ask whether a signal is used.
  bool stop_after_comm = false;
  IntentBelief prior{};
  PlannerOptions planner;
};

/// Steps the closed loop at dt until both agents are within the goal
/// tolerance or the timeout hits (flagged incomplete). A plan computed at
/// tick k starts executing — and its signal fires — at tick k+1; the robot
/// holds still during the very first tick while the first plan "computes".
TrialRecord run_trial(const ScenarioConfig& cfg, const ModeWeights& weights,
                      PlannerKind kind, std::uint64_t seed,
                      const TrialOptions& opts = {});

struct PassInFront {
  std::optional<bool> in_front;
  std::string reason;  // set when undefined
};

/// At the time of minimum separation, is the human inside the robot's
/// forward half-plane? Undefined when the agents never come within 3 m.
PassInFront pass_in_front(const std::vector<RobotState>& robot,
                          const std::vector<HumanState>& human);
PassInFront pass_in_front(const TrialRecord& record);

// ---------------------------------------------------------------------------
// Start-position sweep: one scripted-pedestrian trial per grid point, robot
// starting there facing its goal. Cells record whether (and which) signal
// was used plus the trial metrics; per-point failures are recorded and the
// sweep continues.
// ---------------------------------------------------------------------------

struct SweepSpec {
  int nx = 15;  // grid columns along x (the start-distance axis)
  int ny = 15;  // grid rows along y
  double x_min = -1.0;
  double x_max = 3.0;
  double y_min = 3.5;
  double y_max = 6.5;
  double max_time = 14.0;  // per-trial cap; the signal decision happens early
  bool stop_on_comm = true;
  PlannerOptions planner;
};

struct SweepCell {
  Vec2 start{0.0, 0.0};
  bool ok = false;
  std::string error;
  bool comm_used = false;
  CommAction first_comm = CommAction::kNone;
  double first_comm_time = 0.0;
  Metrics metrics;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;  // row-major: cells[iy * nx + ix]

  const SweepCell& at(int ix, int iy) const {
    return cells[static_cast<size_t>(iy) * static_cast<size_t>(spec.nx) +
                 static_cast<size_t>(ix)];
  }
  /// True if any cell in column ix (fixed start x) used a signal.
  bool column_used_comm(int ix) const;
};

SweepResult sweep_starts(const ScenarioConfig& cfg, const ModeWeights& weights,
                         const SweepSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Seeded batches and their summary statistics.
// ---------------------------------------------------------------------------

/// Runs n trials with seeds trial_seed(base_seed, i). Seeds depend only on
/// the index, so different planner conditions see paired noise streams.
std::vector<TrialRecord> run_batch(const ScenarioConfig& cfg,
                                   const ModeWeights& weights,
                                   PlannerKind kind, std::uint64_t base_seed,
                                   int n, const TrialOptions& opts = {});

struct BatchSummary {
  int n = 0;
  double mean_human_path = 0.0;
  double std_human_path = 0.0;
  double mean_robot_path = 0.0;
  double std_robot_path = 0.0;
  double mean_min_distance = 0.0;
  double mean_duration = 0.0;
  double comm_rate = 0.0;  // signals per trial
  int consistent = 0;      // pass-in-front flag matches the expected intent
  int inconsistent = 0;
  int undefined = 0;
  int incomplete = 0;

  /// Fraction of defined flags matching the expected intent.
  double intent_consistency() const {
    const int defined = consistent + inconsistent;
    return defined == 0 ? 0.0
                        : static_cast<double>(consistent) / defined;
  }
};

/// `expected` is the intent the scenario regime is tuned for (human priority
/// on the canonical crossing); consistency counts trials where the human's
/// crossing side agrees with it.
BatchSummary summarize_batch(const std::vector<TrialRecord>& records,
                             Intent expected);

// ---------------------------------------------------------------------------
// Synthetic demonstrations for the learning pipeline: the pedestrian's
// controls are drawn from the mode reward's own local Gaussian (most likely
// response plus (−H)^{-1/2} noise), re-clamped to the acceleration ball —
// the regime where maximum-likelihood weight recovery is consistent.
// ---------------------------------------------------------------------------

std::vector<Demonstration> gen_demonstrations(const FeatureScales& scales,
                                              const FeatureVec& w_true,
                                              Intent label, int count,
                                              std::uint64_t seed,
                                              double temperature = 1.0,
                                              int horizon = 6, double dt = 0.5);

// ---------------------------------------------------------------------------
// Trace output. One structured-text record per line: a header, one line per
// tick, a final-state line, and a summary footer; plus a flat CSV for plots.
// Both formats carry a version field. Identical records serialize to
// identical bytes.
// ---------------------------------------------------------------------------

std::string trial_to_jsonl(const TrialRecord& record);
std::string trial_to_csv(const TrialRecord& record);
std::string sweep_to_csv(const SweepResult& sweep);
/// Aligned text table, one row per named summary.
std::string batch_summary_table(
    const std::vector<std::pair<std::string, BatchSummary>>& rows);

void save_text(const std::string& path, const std::string& content);

}  // namespace socnav

#endif  // SOCNAV_SIM_H_
