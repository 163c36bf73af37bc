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

#include "socnav/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace socnav {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why,
                       const YAML::Node* node = nullptr) {
  std::ostringstream os;
  os << "config error at '" << path << "': " << why;
  if (node && node->Mark().line >= 0) os << " (line " << node->Mark().line + 1 << ")";
  throw std::runtime_error(os.str());
}

double get_double(const YAML::Node& n, const std::string& path, double dflt) {
  if (!n) return dflt;
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a number", &n);
  }
}

int get_int(const YAML::Node& n, const std::string& path, int dflt) {
  if (!n) return dflt;
  try {
    return n.as<int>();
  } catch (const YAML::Exception&) {
    fail(path, "expected an integer", &n);
  }
}

Vec2 get_vec2(const YAML::Node& n, const std::string& path, const Vec2& dflt) {
  if (!n) return dflt;
  if (!n.IsSequence() || n.size() != 2) fail(path, "expected [x, y]", &n);
  return {get_double(n[0], path + "[0]", 0.0), get_double(n[1], path + "[1]", 0.0)};
}

void check(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw std::invalid_argument("config field '" + field + "': " + why);
}

}  // namespace

Eigen::Matrix2d FeatureScales::front_shape(double heading) const {
  Eigen::Matrix2d rot;
  const double c = std::cos(heading), s = std::sin(heading);
  rot << c, -s, s, c;
  return rot * Eigen::Vector2d(front_major, front_minor).asDiagonal() *
         rot.transpose();
}

void ScenarioConfig::validate() const {
  check(horizon >= 1, "scenario.horizon", "must be >= 1");
  check(dt > 0.0 && std::isfinite(dt), "scenario.dt", "must be positive");
  check(field.x_min < field.x_max && field.y_min < field.y_max,
        "scenario.field", "min must be below max");
  check(field.contains(human_goal), "scenario.human.goal",
        "must lie inside the field bounds");
  check(field.contains(robot_goal), "scenario.robot.goal",
        "must lie inside the field bounds");
  check(human_limits.accel_max > 0.0, "limits.human.accel_max", "must be > 0");
  check(human_limits.speed_max > 0.0, "limits.human.speed_max", "must be > 0");
  check(robot_limits.v_max > 0.0, "limits.robot.v_max", "must be > 0");
  check(robot_limits.omega_max > 0.0, "limits.robot.omega_max", "must be > 0");
  check(features.obstacle_scale > 0.0, "features.obstacle_scale", "must be > 0");
  check(features.avoidance_scale > 0.0, "features.avoidance_scale",
        "must be > 0");
  check(features.front_major > 0.0 && features.front_minor > 0.0,
        "features.front_major/front_minor", "must be > 0");
  check(features.desired_speed > 0.0, "features.desired_speed", "must be > 0");
  check(decay.amplitude > 0.0, "decay.amplitude", "must be > 0");
  check(decay.time_constant > 0.0, "decay.time_constant", "must be > 0");
  check(reward.c_efficiency >= 0.0 && reward.c_comfort >= 0.0 &&
            reward.c_safety >= 0.0 && reward.c_comm >= 0.0,
        "reward.c_*", "component weights must be >= 0");
  check(reward.comm_penalty <= 0.0, "reward.comm_penalty", "must be <= 0");
  check(intent.history_window >= 2, "intent.history_window", "must be >= 2");
  check(intent.min_curvature > 0.0, "intent.min_curvature", "must be > 0");
  check(intent.speed_limit > 0.0, "intent.speed_limit", "must be > 0");
  check(sim.switch_threshold > 0.0 && sim.switch_threshold < 1.0,
        "sim.switch_threshold", "must lie in (0, 1)");
  check(sim.noise_std >= 0.0, "sim.noise_std", "must be >= 0");
  check(sim.goal_tolerance > 0.0, "sim.goal_tolerance", "must be > 0");
  check(sim.timeout > 0.0, "sim.timeout", "must be > 0");
  for (size_t i = 0; i < obstacles.size(); ++i)
    check(obstacles[i].radius >= 0.0,
          "scenario.obstacles[" + std::to_string(i) + "].radius",
          "must be >= 0");
}

ScenarioConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }

  ScenarioConfig cfg;
  const YAML::Node sc = root["scenario"];
  if (sc) {
    cfg.dt = get_double(sc["dt"], "scenario.dt", cfg.dt);
    cfg.horizon = get_int(sc["horizon"], "scenario.horizon", cfg.horizon);
    if (const YAML::Node f = sc["field"]) {
      cfg.field.x_min = get_double(f["x_min"], "scenario.field.x_min", cfg.field.x_min);
      cfg.field.x_max = get_double(f["x_max"], "scenario.field.x_max", cfg.field.x_max);
      cfg.field.y_min = get_double(f["y_min"], "scenario.field.y_min", cfg.field.y_min);
      cfg.field.y_max = get_double(f["y_max"], "scenario.field.y_max", cfg.field.y_max);
    }
    if (const YAML::Node h = sc["human"]) {
      cfg.human_start = get_vec2(h["start"], "scenario.human.start", cfg.human_start);
      cfg.human_goal = get_vec2(h["goal"], "scenario.human.goal", cfg.human_goal);
    }
    if (const YAML::Node r = sc["robot"]) {
      const Vec2 start = get_vec2(r["start"], "scenario.robot.start",
                                  cfg.robot_start.pos());
      cfg.robot_start.x = start.x();
      cfg.robot_start.y = start.y();
      cfg.robot_start.heading =
          get_double(r["heading"], "scenario.robot.heading", cfg.robot_start.heading);
      cfg.robot_goal = get_vec2(r["goal"], "scenario.robot.goal", cfg.robot_goal);
    }
    if (const YAML::Node obs = sc["obstacles"]) {
      if (!obs.IsSequence()) fail("scenario.obstacles", "expected a list", &obs);
      for (size_t i = 0; i < obs.size(); ++i) {
        const std::string p = "scenario.obstacles[" + std::to_string(i) + "]";
        Obstacle o;
        o.center = get_vec2(obs[i]["center"], p + ".center", o.center);
        o.radius = get_double(obs[i]["radius"], p + ".radius", o.radius);
        cfg.obstacles.push_back(o);
      }
    }
  }
  if (const YAML::Node lim = root["limits"]) {
    if (const YAML::Node h = lim["human"]) {
      cfg.human_limits.accel_max = get_double(h["accel_max"], "limits.human.accel_max",
                                              cfg.human_limits.accel_max);
      cfg.human_limits.speed_max = get_double(h["speed_max"], "limits.human.speed_max",
                                              cfg.human_limits.speed_max);
    }
    if (const YAML::Node r = lim["robot"]) {
      cfg.robot_limits.v_max =
          get_double(r["v_max"], "limits.robot.v_max", cfg.robot_limits.v_max);
      cfg.robot_limits.omega_max = get_double(r["omega_max"], "limits.robot.omega_max",
                                              cfg.robot_limits.omega_max);
    }
  }
  if (const YAML::Node f = root["features"]) {
    cfg.features.obstacle_scale = get_double(f["obstacle_scale"], "features.obstacle_scale",
                                             cfg.features.obstacle_scale);
    cfg.features.avoidance_scale = get_double(f["avoidance_scale"], "features.avoidance_scale",
                                              cfg.features.avoidance_scale);
    cfg.features.front_offset =
        get_double(f["front_offset"], "features.front_offset", cfg.features.front_offset);
    cfg.features.front_major =
        get_double(f["front_major"], "features.front_major", cfg.features.front_major);
    cfg.features.front_minor =
        get_double(f["front_minor"], "features.front_minor", cfg.features.front_minor);
    cfg.features.desired_speed =
        get_double(f["desired_speed"], "features.desired_speed", cfg.features.desired_speed);
  }
  if (const YAML::Node r = root["reward"]) {
    cfg.reward.c_efficiency =
        get_double(r["c_efficiency"], "reward.c_efficiency", cfg.reward.c_efficiency);
    cfg.reward.c_comfort = get_double(r["c_comfort"], "reward.c_comfort", cfg.reward.c_comfort);
    cfg.reward.c_safety = get_double(r["c_safety"], "reward.c_safety", cfg.reward.c_safety);
    cfg.reward.c_comm = get_double(r["c_comm"], "reward.c_comm", cfg.reward.c_comm);
    cfg.reward.robot_effort =
        get_double(r["robot_effort"], "reward.robot_effort", cfg.reward.robot_effort);
    cfg.reward.human_effort =
        get_double(r["human_effort"], "reward.human_effort", cfg.reward.human_effort);
    cfg.reward.comm_penalty =
        get_double(r["comm_penalty"], "reward.comm_penalty", cfg.reward.comm_penalty);
    cfg.reward.safety_scale =
        get_double(r["safety_scale"], "reward.safety_scale", cfg.reward.safety_scale);
  }
  if (const YAML::Node d = root["decay"]) {
    cfg.decay.amplitude = get_double(d["amplitude"], "decay.amplitude", cfg.decay.amplitude);
    cfg.decay.time_constant =
        get_double(d["time_constant"], "decay.time_constant", cfg.decay.time_constant);
  }
  if (const YAML::Node i = root["intent"]) {
    cfg.intent.history_window =
        get_int(i["history_window"], "intent.history_window", cfg.intent.history_window);
    cfg.intent.min_curvature =
        get_double(i["min_curvature"], "intent.min_curvature", cfg.intent.min_curvature);
    cfg.intent.smooth_abs_eps =
        get_double(i["smooth_abs_eps"], "intent.smooth_abs_eps", cfg.intent.smooth_abs_eps);
    cfg.intent.speed_limit =
        get_double(i["speed_limit"], "intent.speed_limit", cfg.intent.speed_limit);
  }
  if (const YAML::Node s = root["sim"]) {
    cfg.sim.noise_std = get_double(s["noise_std"], "sim.noise_std", cfg.sim.noise_std);
    cfg.sim.switch_threshold =
        get_double(s["switch_threshold"], "sim.switch_threshold", cfg.sim.switch_threshold);
    cfg.sim.switch_hysteresis =
        get_double(s["switch_hysteresis"], "sim.switch_hysteresis", cfg.sim.switch_hysteresis);
    cfg.sim.goal_tolerance =
        get_double(s["goal_tolerance"], "sim.goal_tolerance", cfg.sim.goal_tolerance);
    cfg.sim.timeout = get_double(s["timeout"], "sim.timeout", cfg.sim.timeout);
    cfg.sim.scripted_speed =
        get_double(s["scripted_speed"], "sim.scripted_speed", cfg.sim.scripted_speed);
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_yaml(const ScenarioConfig& cfg) {
  YAML::Emitter out;
  auto vec2 = [&out](const Vec2& v) {
    out << YAML::Flow << YAML::BeginSeq << v.x() << v.y() << YAML::EndSeq;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << cfg.dt;
  out << YAML::Key << "horizon" << YAML::Value << cfg.horizon;
  out << YAML::Key << "field" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "x_min" << YAML::Value << cfg.field.x_min;
  out << YAML::Key << "x_max" << YAML::Value << cfg.field.x_max;
  out << YAML::Key << "y_min" << YAML::Value << cfg.field.y_min;
  out << YAML::Key << "y_max" << YAML::Value << cfg.field.y_max;
  out << YAML::EndMap;
  out << YAML::Key << "human" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "start" << YAML::Value;
  vec2(cfg.human_start);
  out << YAML::Key << "goal" << YAML::Value;
  vec2(cfg.human_goal);
  out << YAML::EndMap;
  out << YAML::Key << "robot" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "start" << YAML::Value;
  vec2(cfg.robot_start.pos());
  out << YAML::Key << "heading" << YAML::Value << cfg.robot_start.heading;
  out << YAML::Key << "goal" << YAML::Value;
  vec2(cfg.robot_goal);
  out << YAML::EndMap;
  out << YAML::Key << "obstacles" << YAML::Value << YAML::BeginSeq;
  for (const Obstacle& o : cfg.obstacles) {
    out << YAML::BeginMap;
    out << YAML::Key << "center" << YAML::Value;
    vec2(o.center);
    out << YAML::Key << "radius" << YAML::Value << o.radius;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "limits" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "human" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "accel_max" << YAML::Value << cfg.human_limits.accel_max;
  out << YAML::Key << "speed_max" << YAML::Value << cfg.human_limits.speed_max;
  out << YAML::EndMap;
  out << YAML::Key << "robot" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "v_max" << YAML::Value << cfg.robot_limits.v_max;
  out << YAML::Key << "omega_max" << YAML::Value << cfg.robot_limits.omega_max;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "features" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "obstacle_scale" << YAML::Value << cfg.features.obstacle_scale;
  out << YAML::Key << "avoidance_scale" << YAML::Value << cfg.features.avoidance_scale;
  out << YAML::Key << "front_offset" << YAML::Value << cfg.features.front_offset;
  out << YAML::Key << "front_major" << YAML::Value << cfg.features.front_major;
  out << YAML::Key << "front_minor" << YAML::Value << cfg.features.front_minor;
  out << YAML::Key << "desired_speed" << YAML::Value << cfg.features.desired_speed;
  out << YAML::EndMap;

  out << YAML::Key << "reward" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "c_efficiency" << YAML::Value << cfg.reward.c_efficiency;
  out << YAML::Key << "c_comfort" << YAML::Value << cfg.reward.c_comfort;
  out << YAML::Key << "c_safety" << YAML::Value << cfg.reward.c_safety;
  out << YAML::Key << "c_comm" << YAML::Value << cfg.reward.c_comm;
  out << YAML::Key << "robot_effort" << YAML::Value << cfg.reward.robot_effort;
  out << YAML::Key << "human_effort" << YAML::Value << cfg.reward.human_effort;
  out << YAML::Key << "comm_penalty" << YAML::Value << cfg.reward.comm_penalty;
  out << YAML::Key << "safety_scale" << YAML::Value << cfg.reward.safety_scale;
  out << YAML::EndMap;

  out << YAML::Key << "decay" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "amplitude" << YAML::Value << cfg.decay.amplitude;
  out << YAML::Key << "time_constant" << YAML::Value << cfg.decay.time_constant;
  out << YAML::EndMap;

  out << YAML::Key << "intent" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "history_window" << YAML::Value << cfg.intent.history_window;
  out << YAML::Key << "min_curvature" << YAML::Value << cfg.intent.min_curvature;
  out << YAML::Key << "smooth_abs_eps" << YAML::Value << cfg.intent.smooth_abs_eps;
  out << YAML::Key << "speed_limit" << YAML::Value << cfg.intent.speed_limit;
  out << YAML::EndMap;

  out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "noise_std" << YAML::Value << cfg.sim.noise_std;
  out << YAML::Key << "switch_threshold" << YAML::Value << cfg.sim.switch_threshold;
  out << YAML::Key << "switch_hysteresis" << YAML::Value << cfg.sim.switch_hysteresis;
  out << YAML::Key << "goal_tolerance" << YAML::Value << cfg.sim.goal_tolerance;
  out << YAML::Key << "timeout" << YAML::Value << cfg.sim.timeout;
  out << YAML::Key << "scripted_speed" << YAML::Value << cfg.sim.scripted_speed;
  out << YAML::EndMap << YAML::EndMap;

  return std::string(out.c_str()) + "\n";
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << config_to_yaml(cfg);
}

}  // namespace socnav
