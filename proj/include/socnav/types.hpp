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

#ifndef SOCNAV_TYPES_H_
#define SOCNAV_TYPES_H_

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace socnav {

using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Robot intent, identified with the human behavior mode: a human who
/// believes the robot yields priority with probability p navigates in
/// human-priority mode with the same probability.
enum class Intent { kHumanPriority, kRobotPriority };

/// Discrete communication action: announce an intent, or stay silent.
enum class CommAction { kNone, kHumanPriority, kRobotPriority };

inline Intent comm_intent(CommAction c) {
  switch (c) {
    case CommAction::kHumanPriority:
      return Intent::kHumanPriority;
    case CommAction::kRobotPriority:
      return Intent::kRobotPriority;
    default:
      throw std::invalid_argument("comm_intent: 'none' carries no intent");
  }
}

inline const char* to_string(Intent i) {
  return i == Intent::kHumanPriority ? "human_priority" : "robot_priority";
}

inline const char* to_string(CommAction c) {
  switch (c) {
    case CommAction::kNone:
      return "none";
    case CommAction::kHumanPriority:
      return "human_priority";
    default:
      return "robot_priority";
  }
}

/// Planar human state: position and velocity.
struct HumanState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  Vec2 pos() const { return {x, y}; }
  Vec2 vel() const { return {vx, vy}; }
  double speed() const { return std::hypot(vx, vy); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(vx) &&
           std::isfinite(vy);
  }
};

/// Human control: planar acceleration.
struct HumanAction {
  double ax = 0.0;
  double ay = 0.0;

  Vec2 vec() const { return {ax, ay}; }
  double magnitude() const { return std::hypot(ax, ay); }
  bool finite() const { return std::isfinite(ax) && std::isfinite(ay); }
};

/// Robot pose. Heading is kept normalized to (-pi, pi].
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 pos() const { return {x, y}; }
  Vec2 heading_vec() const { return {std::cos(heading), std::sin(heading)}; }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(heading);
  }
};

/// Robot control for the differential-drive model: linear and angular speed.
struct RobotAction {
  double v = 0.0;
  double omega = 0.0;

  bool finite() const { return std::isfinite(v) && std::isfinite(omega); }
};

}  // namespace socnav

#endif  // SOCNAV_TYPES_H_
