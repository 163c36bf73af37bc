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

#ifndef SOCNAV_CONFIG_H_
#define SOCNAV_CONFIG_H_

#include <string>
#include <vector>

#include "socnav/dynamics.hpp"
#include "socnav/types.hpp"

namespace socnav {

struct FieldBounds {
  double x_min = 0.0;
  double x_max = 8.0;
  double y_min = 0.0;
  double y_max = 10.0;

  bool contains(const Vec2& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
};

struct Obstacle {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
};

struct FeatureScales {
  double obstacle_scale = 0.5;   // m, Gaussian width of obstacle penalty
  double avoidance_scale = 1.0;  // m, Gaussian width of robot-proximity penalty
  double front_offset = 0.8;     // m, penalty center ahead of the robot
  double front_major = 1.0;      // m^2, penalty shape variance along heading
  double front_minor = 0.25;     // m^2, variance across heading
  double desired_speed = 0.5;    // m/s, robot cruise speed prior

  /// Front-penalty shaping matrix in world frame for a given robot heading:
  /// R(heading) * diag(front_major, front_minor) * R(heading)^T.
  Eigen::Matrix2d front_shape(double heading) const;
};

struct DecayParams {
  double amplitude = 8.0;      // boost of a fresh signal over the flat floor
  double time_constant = 3.0;  // s
};

struct RobotRewardParams {
  // Component weights; efficiency/comfort carry the priority regime ratio.
  double c_efficiency = 1.0;
  double c_comfort = 2.0;
  double c_safety = 5.0;
  double c_comm = 1.0;
  double robot_effort = 0.1;   // effort vs. goal-distance tradeoff, robot
  double human_effort = 0.1;   // same tradeoff inside the comfort term
  double comm_penalty = -0.5;  // flat reward for emitting a signal (<= 0)
  double safety_scale = 1.0;   // m, Gaussian width of the collision penalty
};

struct IntentParams {
  int history_window = 6;       // steps of motion evidence per update
  double min_curvature = 1.0;   // curvature floor in the motion normalizer
  double smooth_abs_eps = 0.25; // softening of |.| inside that normalizer
  double speed_limit = 2.0;     // m/s, edge of the feasible-velocity domain
};

struct SimParams {
  double noise_std = 0.1;          // m/s^2, control noise of the sim human
  double switch_threshold = 0.35;  // belief below this re-samples the mode
  double switch_hysteresis = 1.0;  // s between mode switches
  double goal_tolerance = 0.3;     // m
  double timeout = 60.0;           // s
  double scripted_speed = 1.2;     // m/s, fixed-policy pedestrian
};

struct ScenarioConfig {
  FieldBounds field;
  double dt = 0.5;
  int horizon = 6;

  Vec2 human_start{4.0, 1.0};
  Vec2 human_goal{4.0, 9.0};
  RobotState robot_start{1.0, 5.0, 0.0};
  Vec2 robot_goal{7.5, 5.0};
  std::vector<Obstacle> obstacles;

  HumanControlBounds human_limits;
  RobotControlBounds robot_limits;
  FeatureScales features;
  RobotRewardParams reward;
  DecayParams decay;
  IntentParams intent;
  SimParams sim;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Parses a YAML scenario file. Unset fields keep their defaults. Parse or
/// type errors throw std::runtime_error with the field path and, when the
/// parser provides one, the source line.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& yaml_text);

/// Writes the full schema (every field explicit) as YAML.
void save_config(const ScenarioConfig& cfg, const std::string& path);
std::string config_to_yaml(const ScenarioConfig& cfg);

}  // namespace socnav

#endif  // SOCNAV_CONFIG_H_
