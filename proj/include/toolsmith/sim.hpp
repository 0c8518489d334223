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

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "toolsmith/collision.hpp"
#include "toolsmith/geometry.hpp"
#include "toolsmith/trajectory.hpp"
#include "toolsmith/urdf_model.hpp"

namespace toolsmith
{

/// Contact band for resting objects, meters.
inline constexpr double kSupportTolerance = 0.002;
/// Nominal duration of one trajectory sample, seconds.
inline constexpr double kStepDuration = 0.02;
inline constexpr double kWorkspaceRadius = 0.855;

class BackendError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct BoxShape
{
  Vec3 half_extents = Vec3::Zero();
};

struct SphereShape
{
  double radius = 0.0;
};

struct BoxPart
{
  /// Part frame relative to the owning object.
  Pose offset;
  Vec3 half_extents = Vec3::Zero();
};

struct CompositeShape
{
  std::vector<BoxPart> parts;
};

using Shape = std::variant<BoxShape, SphereShape, CompositeShape>;

struct SceneObject
{
  std::string id;
  Shape shape = BoxShape{};
  Pose pose;
  bool movable = false;
  /// Markers (goal zones, target points) take no part in contact.
  bool collidable = true;
  /// Peak per-step displacement / kStepDuration seen so far, m/s.
  double held_speed = 0.0;
  std::optional<std::array<double, 4>> color;

  std::vector<Primitive> primitives() const { return primitives_at(pose); }
  std::vector<Primitive> primitives_at(const Pose & at) const;
  Aabb bounds() const;
};

struct SceneState
{
  std::map<std::string, SceneObject> objects;
  Pose ee_pose;
  bool gripper_open = true;
  std::size_t step_index = 0;
  /// Objects currently held between the fingers.
  std::vector<std::string> grasped;

  /// Throws std::out_of_range for unknown ids.
  const SceneObject & at(const std::string & id) const;
};

/// Exact (bitwise for floats) equality, used for determinism checks.
bool identical(const SceneState & a, const SceneState & b);

struct Diagnostic
{
  std::string kind;
  std::string object;
  std::size_t first_step = 0;
  std::size_t count = 0;
  double max_value = 0.0;
};

bool operator==(const Diagnostic & a, const Diagnostic & b);

struct RolloutResult
{
  SceneState final_state;
  double trajectory_length = 0.0;
  std::optional<std::vector<SceneState>> state_log;
  std::vector<Diagnostic> diagnostics;
};

bool identical(const RolloutResult & a, const RolloutResult & b);

struct SimParams
{
  double support_tolerance = kSupportTolerance;
  double step_duration = kStepDuration;
  double workspace_radius = kWorkspaceRadius;
  Vec3 workspace_center = Vec3::Zero();
  bool record_log = false;
  /// Log every n-th step (the final state is always logged).
  std::size_t log_every = 1;
};

/// Tool collision geometry in the end-effector frame.
struct ToolGeometry
{
  enum class Side
  {
    Flange,
    Left,
    Right,
  };

  std::vector<OrientedBox> boxes;
  std::vector<Side> sides;
  bool gripper = false;
  Pose left_finger;
  Pose right_finger;
  /// Finger frame separation plus the finger-pad widths.
  double grasp_width = 0.0;

  static ToolGeometry from_robot(const RobotDescription & robot);
  std::vector<OrientedBox> at(const Pose & ee_pose) const;
};

/// Records repeated events as one entry per (kind, object).
class DiagnosticLog
{
public:
  void add(const std::string & kind, const std::string & object, std::size_t step, double value);
  std::vector<Diagnostic> entries() const;

private:
  std::map<std::pair<std::string, std::string>, Diagnostic> entries_;
};

/// One quasi-static update: the end effector moves to `next_ee_pose` and the
/// scene responds via the grasp, support, containment, push and settle rules.
SceneState quasi_static_step(
  const SceneState & state, const Pose & next_ee_pose, bool gripper_closed, const ToolGeometry & tool,
  const SimParams & params = {}, DiagnosticLog * log = nullptr);

/// Nearest point of the reachable ball.
Vec3 clamp_to_workspace(const Vec3 & p, const SimParams & params);

struct BackendCapabilities
{
  bool gripper = true;
  bool full_dynamics = false;
};

class SimulatorBackend
{
public:
  virtual ~SimulatorBackend() = default;
  virtual std::string name() const = 0;
  virtual BackendCapabilities capabilities() const = 0;
  /// When false the engine clones one instance per concurrent rollout.
  virtual bool concurrent_safe() const = 0;
  virtual std::unique_ptr<SimulatorBackend> clone() const = 0;
  virtual RolloutResult rollout(
    const SceneState & scene, const RobotDescription & robot, const DenseTrajectory & traj) const = 0;
};

class BuiltinBackend : public SimulatorBackend
{
public:
  explicit BuiltinBackend(SimParams params = {}) : params_(params) {}

  std::string name() const override { return "builtin"; }
  BackendCapabilities capabilities() const override { return {true, false}; }
  bool concurrent_safe() const override { return true; }
  std::unique_ptr<SimulatorBackend> clone() const override;
  RolloutResult rollout(
    const SceneState & scene, const RobotDescription & robot, const DenseTrajectory & traj) const override;

  const SimParams & params() const { return params_; }

private:
  SimParams params_;
};

RolloutResult rollout(
  const SimulatorBackend & backend, const SceneState & scene, const RobotDescription & robot,
  const DenseTrajectory & traj);

}  // namespace toolsmith
