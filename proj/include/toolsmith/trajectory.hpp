// Copyright 2026 The Toolsmith Authors
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

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "toolsmith/geometry.hpp"

namespace toolsmith
{

class InvalidPlan : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultStepMax = 0.005;
inline constexpr double kDefaultAngleStepMax = M_PI / 180.0;

struct Waypoint
{
  Vec3 position = Vec3::Zero();
  /// Roll, pitch, yaw in radians (extrinsic X-Y-Z).
  Vec3 rpy = Vec3::Zero();
  /// 0 = open, 1 = closed; present only in 7-column plans.
  std::optional<int> gripper;
};

/// End-effector waypoints. Construction validates shape and finiteness.
class ActionPlan
{
public:
  ActionPlan() = default;
  explicit ActionPlan(std::vector<Waypoint> waypoints);

  /// Rows of 6 (pose) or 7 (pose + gripper bit) numbers.
  static ActionPlan from_rows(const std::vector<std::vector<double>> & rows);
  static ActionPlan from_json(const nlohmann::json & j);

  std::vector<std::vector<double>> to_rows() const;
  nlohmann::json to_json() const;

  const std::vector<Waypoint> & waypoints() const { return waypoints_; }
  bool uses_gripper() const { return uses_gripper_; }
  std::size_t size() const { return waypoints_.size(); }
  std::size_t row_width() const { return uses_gripper_ ? 7 : 6; }

private:
  std::vector<Waypoint> waypoints_;
  bool uses_gripper_ = false;
};

struct TrajectorySample
{
  std::size_t index = 0;
  Pose pose;
  bool gripper_closed = false;
  /// Waypoint at the start of the segment this sample belongs to.
  std::size_t segment = 0;
  /// Set when the sample coincides with a source waypoint.
  std::optional<std::size_t> waypoint;
};

struct DenseTrajectory
{
  std::vector<TrajectorySample> samples;
  bool uses_gripper = false;
  double step_max = kDefaultStepMax;
  double angle_step_max = kDefaultAngleStepMax;
};

/// Spherical interpolation along the shorter arc. t = 0 and t = 1 return the
/// inputs unchanged.
Quat slerp(const Quat & from, const Quat & to, double t);

DenseTrajectory densify(
  const ActionPlan & plan, double step_max = kDefaultStepMax,
  double angle_step_max = kDefaultAngleStepMax);

double path_length(const DenseTrajectory & traj);

}  // namespace toolsmith
