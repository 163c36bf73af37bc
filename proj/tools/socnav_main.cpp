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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "socnav/config.hpp"
#include "socnav/irl.hpp"
#include "socnav/sim.hpp"

namespace {

using namespace socnav;

ScenarioConfig load_or_default(const std::string& path) {
  ScenarioConfig cfg = path.empty() ? ScenarioConfig{} : load_config(path);
  cfg.validate();
  return cfg;
}

ModeWeights resolve_weights(const std::string& path) {
  if (path.empty()) {
    std::cerr << "note: no --weights given, using built-in default weights\n";
    return default_mode_weights();
  }
  if (!std::filesystem::exists(path))
    throw std::runtime_error(
        "weights file not found: " + path +
        " (run `socnav train` to produce one, or omit --weights to use the "
        "built-in defaults)");
  return load_mode_weights(path);
}

// Solver settings for closed-loop batches and sweeps: signal decisions and
// trajectories are insensitive to the last digits of the inner solves, and
// the full-accuracy settings cost several times more per tick.
PlannerOptions fast_planner() {
  PlannerOptions opts;
  opts.outer.max_iterations = 30;
  opts.outer.grad_tolerance = 3e-4;
  opts.inner.max_iterations = 150;
  opts.inner.grad_tolerance = 1e-5;
  return opts;
}

std::string describe(const TrialRecord& r) {
  std::string line = "planner=" + std::string(to_string(r.planner)) +
                     " seed=" + std::to_string(r.seed) +
                     " duration=" + std::to_string(r.metrics.duration) +
                     (r.incomplete ? " (timeout)" : "") +
                     " comms=" + std::to_string(r.metrics.comm_count);
  for (const CommEvent& e : r.comm_events)
    line += " [" + std::string(to_string(e.message)) + " @ " +
            std::to_string(e.t_c) + "s]";
  line += " human_path=" + std::to_string(r.metrics.human_path_length) +
          " robot_path=" + std::to_string(r.metrics.robot_path_length) +
          " min_dist=" + std::to_string(r.metrics.min_distance);
  line += " pass_in_front=";
  line += r.metrics.pass_in_front ? (*r.metrics.pass_in_front ? "yes" : "no")
                                  : "undefined";
  return line;
}

struct GenDataArgs {
  std::string config, out, weights, mode = "both";
  int count = 200;
  std::uint64_t seed = 1;
  double weight_scale = 100.0;
  double temperature = 1.0;
};

void run_gen_data(const GenDataArgs& a) {
  const ScenarioConfig cfg = load_or_default(a.config);
  ModeWeights truth = resolve_weights(a.weights);
  truth.human_priority *= a.weight_scale;
  truth.robot_priority *= a.weight_scale;

  std::vector<Demonstration> demos;
  if (a.mode == "both" || a.mode == "human") {
    const auto d = gen_demonstrations(cfg.features, truth.human_priority,
                                      Intent::kHumanPriority, a.count,
                                      trial_seed(a.seed, 0), a.temperature,
                                      cfg.horizon, cfg.dt);
    demos.insert(demos.end(), d.begin(), d.end());
  }
  if (a.mode == "both" || a.mode == "robot") {
    const auto d = gen_demonstrations(cfg.features, truth.robot_priority,
                                      Intent::kRobotPriority, a.count,
                                      trial_seed(a.seed, 1), a.temperature,
                                      cfg.horizon, cfg.dt);
    demos.insert(demos.end(), d.begin(), d.end());
  }
  save_demonstrations(a.out, demos);
  std::cout << "wrote " << demos.size() << " demonstration windows to "
            << a.out << "\n";
}

struct TrainArgs {
  std::string config, data, out;
  int iterations = 500;
  double tolerance = 1e-5;
};

void run_train(const TrainArgs& a) {
  const ScenarioConfig cfg = load_or_default(a.config);
  const auto demos = load_demonstrations(a.data, cfg.features);

  std::vector<Demonstration> human, robot;
  for (const Demonstration& d : demos)
    (d.label == Intent::kHumanPriority ? human : robot).push_back(d);
  if (human.empty() || robot.empty())
    throw std::runtime_error(
        "training needs windows for both behavior modes; " + a.data +
        " has " + std::to_string(human.size()) + " human-priority and " +
        std::to_string(robot.size()) + " robot-priority windows");

  TrainOptions topts;
  topts.max_iterations = a.iterations;
  topts.grad_tolerance = a.tolerance;

  ModeWeights learned;
  for (const auto& [name, windows, slot] :
       {std::tuple<const char*, const std::vector<Demonstration>*,
                   FeatureVec*>{"human_priority", &human,
                                &learned.human_priority},
        {"robot_priority", &robot, &learned.robot_priority}}) {
    const TrainResult res =
        train(*windows, FeatureVec::Constant(-0.1), topts);
    *slot = res.weights;
    std::cout << name << ": windows=" << windows->size()
              << " iterations=" << res.iterations
              << " log_likelihood=" << res.log_likelihood
              << " grad_norm=" << res.grad_norm
              << (res.converged ? "" : " (not converged)") << "\n";
  }
  save_mode_weights(a.out, learned, cfg.features);
  std::cout << "wrote weights to " << a.out << "\n";
}

struct RunArgs {
  std::string config, weights, out, csv, planner = "comm";
  std::uint64_t seed = 0;
  bool scripted = false;
  bool fast = false;
  double max_time = 0.0;
};

void run_run(const RunArgs& a) {
  const ScenarioConfig cfg = load_or_default(a.config);
  const ModeWeights w = resolve_weights(a.weights);
  TrialOptions topts;
  topts.scripted_human = a.scripted;
  topts.max_time = a.max_time;
  if (a.fast) topts.planner = fast_planner();

  const TrialRecord rec =
      run_trial(cfg, w, planner_kind_from_string(a.planner), a.seed, topts);
  if (!a.out.empty()) save_text(a.out, trial_to_jsonl(rec));
  if (!a.csv.empty()) save_text(a.csv, trial_to_csv(rec));
  std::cout << describe(rec) << "\n";
}

struct SweepArgs {
  std::string config, weights, out;
  SweepSpec spec;
  std::uint64_t seed = 1;
  bool full_trials = false;
  bool thorough = false;
};

void run_sweep(const SweepArgs& a) {
  const ScenarioConfig cfg = load_or_default(a.config);
  const ModeWeights w = resolve_weights(a.weights);
  SweepSpec spec = a.spec;
  spec.stop_on_comm = !a.full_trials;
  if (!a.thorough) spec.planner = fast_planner();

  const SweepResult sw = sweep_starts(cfg, w, spec, a.seed);
  save_text(a.out, sweep_to_csv(sw));

  int ok = 0, used = 0;
  for (const SweepCell& c : sw.cells) {
    ok += c.ok;
    used += c.ok && c.comm_used;
  }
  std::cout << "swept " << sw.cells.size() << " starts (" << ok
            << " ok, " << used << " used a signal); columns with signals:";
  for (int ix = 0; ix < spec.nx; ++ix)
    if (sw.column_used_comm(ix)) std::cout << " " << ix;
  std::cout << "\nwrote " << a.out << "\n";
}

struct EvalArgs {
  std::string config, weights, data;
};

void run_eval(const EvalArgs& a) {
  const ScenarioConfig cfg = load_or_default(a.config);
  const ModeWeights w = resolve_weights(a.weights);
  const auto demos = load_demonstrations(a.data, cfg.features);

  std::vector<Demonstration> human, robot;
  for (const Demonstration& d : demos)
    (d.label == Intent::kHumanPriority ? human : robot).push_back(d);

  for (const auto& [name, windows, wv] :
       {std::tuple<const char*, const std::vector<Demonstration>*,
                   const FeatureVec*>{"human_priority", &human,
                                      &w.human_priority},
        {"robot_priority", &robot, &w.robot_priority}}) {
    if (windows->empty()) {
      std::cout << name << ": no windows\n";
      continue;
    }
    const ValidationReport rep = cross_validate(
        *wv, *windows, cfg.horizon, cfg.human_limits.accel_max);
    std::cout << name << ": windows=" << windows->size()
              << " mean_error=" << rep.mean_error << " m"
              << " same_side=" << rep.type_one << "/"
              << rep.type_one + rep.type_two << "\n";
  }
}

struct BatchArgs {
  std::string config, weights, out, planner = "all", expect = "human";
  int n = 20;
  std::uint64_t seed = 1;
  bool scripted = false;
  bool thorough = false;
  double max_time = 0.0;
};

void run_batch_cmd(const BatchArgs& a) {
  const ScenarioConfig cfg = load_or_default(a.config);
  const ModeWeights w = resolve_weights(a.weights);
  const Intent expected = a.expect == "human" ? Intent::kHumanPriority
                                              : Intent::kRobotPriority;
  TrialOptions topts;
  topts.scripted_human = a.scripted;
  topts.max_time = a.max_time;
  if (!a.thorough) topts.planner = fast_planner();

  std::vector<PlannerKind> kinds;
  if (a.planner == "all")
    kinds = {PlannerKind::kCommunicative, PlannerKind::kImplicitOnly,
             PlannerKind::kBaseline};
  else
    kinds = {planner_kind_from_string(a.planner)};

  std::vector<std::pair<std::string, BatchSummary>> rows;
  for (const PlannerKind kind : kinds) {
    const auto records = run_batch(cfg, w, kind, a.seed, a.n, topts);
    rows.emplace_back(to_string(kind), summarize_batch(records, expected));
    if (!a.out.empty()) {
      std::filesystem::create_directories(a.out);
      for (size_t i = 0; i < records.size(); ++i)
        save_text(a.out + "/trace_" + to_string(kind) + "_" +
                      std::to_string(i) + ".jsonl",
                  trial_to_jsonl(records[i]));
    }
  }
  const std::string table = batch_summary_table(rows);
  std::cout << table;
  if (!a.out.empty()) {
    save_text(a.out + "/summary.txt", table);
    std::cout << "wrote traces and summary to " << a.out << "/\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "socnav: crossing-scenario navigation with joint motion and signal "
      "planning — data generation, reward learning, closed-loop trials, "
      "start sweeps, and batch evaluation"};
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* cmd = app.add_subcommand(
      "gen-data", "Generate synthetic pedestrian demonstration windows");
  cmd->add_option("--config", gen.config, "scenario YAML (defaults if unset)");
  cmd->add_option("--mode", gen.mode, "both|human|robot")
      ->check(CLI::IsMember({"both", "human", "robot"}));
  cmd->add_option("--count", gen.count, "windows per mode")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", gen.seed, "RNG seed");
  cmd->add_option("--weights", gen.weights,
                  "truth weights file (built-in defaults if unset)");
  cmd->add_option("--weight-scale", gen.weight_scale,
                  "scale on the truth weights (sharpness of the data)");
  cmd->add_option("--temperature", gen.temperature, "sampling temperature");
  cmd->add_option("--out", gen.out, "output demonstrations (JSONL)")
      ->required();
  cmd->callback([&gen] { run_gen_data(gen); });

  TrainArgs tr;
  cmd = app.add_subcommand("train",
                           "Fit per-mode reward weights to demonstrations");
  cmd->add_option("--config", tr.config, "scenario YAML (defaults if unset)");
  cmd->add_option("--data", tr.data, "demonstrations JSONL")->required();
  cmd->add_option("--iterations", tr.iterations, "max ascent iterations");
  cmd->add_option("--tolerance", tr.tolerance, "gradient tolerance");
  cmd->add_option("--out", tr.out, "output weights file (JSON)")->required();
  cmd->callback([&tr] { run_train(tr); });

  RunArgs rn;
  cmd = app.add_subcommand("run", "Run one closed-loop trial");
  cmd->add_option("--config", rn.config, "scenario YAML (defaults if unset)");
  cmd->add_option("--weights", rn.weights,
                  "trained weights (built-in defaults if unset)");
  cmd->add_option("--planner", rn.planner, "comm|implicit|baseline")
      ->check(CLI::IsMember({"comm", "implicit", "baseline"}));
  cmd->add_option("--seed", rn.seed, "trial seed");
  cmd->add_option("--max-time", rn.max_time,
                  "cap simulated seconds (config timeout if unset)");
  cmd->add_flag("--scripted", rn.scripted,
                "fixed straight-line pedestrian instead of the model");
  cmd->add_flag("--fast", rn.fast, "cheaper solver settings");
  cmd->add_option("--out", rn.out, "trace output (JSONL)");
  cmd->add_option("--csv", rn.csv, "trace output (CSV)");
  cmd->callback([&rn] { run_run(rn); });

  SweepArgs sw;
  cmd = app.add_subcommand(
      "sweep", "Map signal usage over a grid of robot start positions");
  cmd->add_option("--config", sw.config, "scenario YAML (defaults if unset)");
  cmd->add_option("--weights", sw.weights,
                  "trained weights (built-in defaults if unset)");
  cmd->add_option("--nx", sw.spec.nx, "grid columns")->check(
      CLI::PositiveNumber);
  cmd->add_option("--ny", sw.spec.ny, "grid rows")->check(CLI::PositiveNumber);
  cmd->add_option("--x-min", sw.spec.x_min, "start grid x minimum");
  cmd->add_option("--x-max", sw.spec.x_max, "start grid x maximum");
  cmd->add_option("--y-min", sw.spec.y_min, "start grid y minimum");
  cmd->add_option("--y-max", sw.spec.y_max, "start grid y maximum");
  cmd->add_option("--max-time", sw.spec.max_time, "per-trial simulated cap");
  cmd->add_option("--seed", sw.seed, "base seed");
  cmd->add_flag("--full-trials", sw.full_trials,
                "do not stop trials at the first signal");
  cmd->add_flag("--thorough", sw.thorough, "full-accuracy solver settings");
  cmd->add_option("--out", sw.out, "sweep output (CSV)")->required();
  cmd->callback([&sw] { run_sweep(sw); });

  EvalArgs ev;
  cmd = app.add_subcommand(
      "eval", "Cross-validate weights against held-out demonstrations");
  cmd->add_option("--config", ev.config, "scenario YAML (defaults if unset)");
  cmd->add_option("--weights", ev.weights,
                  "weights to evaluate (built-in defaults if unset)");
  cmd->add_option("--data", ev.data, "held-out demonstrations JSONL")
      ->required();
  cmd->callback([&ev] { run_eval(ev); });

  BatchArgs ba;
  cmd = app.add_subcommand("batch",
                           "Run seeded trial batches per planner condition");
  cmd->add_option("--config", ba.config, "scenario YAML (defaults if unset)");
  cmd->add_option("--weights", ba.weights,
                  "trained weights (built-in defaults if unset)");
  cmd->add_option("--planner", ba.planner, "all|comm|implicit|baseline")
      ->check(CLI::IsMember({"all", "comm", "implicit", "baseline"}));
  cmd->add_option("-n,--n", ba.n, "trials per condition")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", ba.seed, "base seed (paired across conditions)");
  cmd->add_option("--expect", ba.expect,
                  "intent the regime is tuned for (consistency reference)")
      ->check(CLI::IsMember({"human", "robot"}));
  cmd->add_option("--max-time", ba.max_time,
                  "cap simulated seconds (config timeout if unset)");
  cmd->add_flag("--scripted", ba.scripted, "fixed straight-line pedestrian");
  cmd->add_flag("--thorough", ba.thorough, "full-accuracy solver settings");
  cmd->add_option("--out", ba.out, "directory for traces and the summary");
  cmd->callback([&ba] { run_batch_cmd(ba); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
