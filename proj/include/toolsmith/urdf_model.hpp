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
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "toolsmith/geometry.hpp"

namespace toolsmith
{

/// Per-link mass ceiling for tool parts, kilograms.
inline constexpr double kMaxLinkMass = 0.010;
/// Allowed clearance between a child box and its parent box.
inline constexpr double kGapTolerance = 0.001;

inline constexpr const char * kVirtualFlange = "panda_virtual";
inline constexpr const char * kLeftFinger = "panda_leftfinger";
inline constexpr const char * kRightFinger = "panda_rightfinger";

class ParseError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class Violation
{
  Mass,
  Gap,
  NonBox,
  BadAttachment,
  Extents,
  Structure,
  DuplicateName,
  DuplicateTool,
};

const char * to_string(Violation v);

class ValidationError : public std::runtime_error
{
public:
  ValidationError(Violation kind, const std::string & what);
  Violation kind() const { return kind_; }

private:
  Violation kind_;
};

/// URDF `<origin xyz rpy>`; rpy uses the extrinsic X-Y-Z convention.
struct Origin
{
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();

  Pose to_pose() const { return Pose{xyz, euler_to_quaternion(rpy)}; }
};

struct BoxLink
{
  std::string name;
  Vec3 half_extents = Vec3::Zero();
  double mass = 0.0;
  /// Geometry origin inside the link frame.
  Origin origin;
  std::optional<std::array<double, 4>> color;
};

struct FixedJoint
{
  std::string name;
  std::string parent;
  std::string child;
  /// Child link frame expressed in the parent link frame.
  Origin origin;
};

struct VirtualFlangeAttachment
{
};

struct GripperFingersAttachment
{
  std::vector<std::string> left_roots;
  std::vector<std::string> right_roots;
};

using Attachment = std::variant<VirtualFlangeAttachment, GripperFingersAttachment>;

struct ToolDesign
{
  std::vector<BoxLink> links;
  std::vector<FixedJoint> joints;
  Attachment attachment = VirtualFlangeAttachment{};
  /// Fragment text exactly as received (not part of structural equality).
  std::string source_text;
  std::vector<std::string> warnings;

  bool uses_gripper() const { return std::holds_alternative<GripperFingersAttachment>(attachment); }
  const BoxLink * find_link(const std::string & name) const;
  const FixedJoint * parent_joint(const std::string & link) const;
};

/// Field-for-field comparison of links, joints and attachment.
bool approx_equal(const ToolDesign & a, const ToolDesign & b, double tol = 1e-9);

struct BaseLink
{
  std::string name;
  std::optional<std::string> parent;
  std::string joint_name;
  std::string joint_type;
  Origin origin;
};

/// Stand-in for the arm: the end-effector frame plus optional finger frames.
struct RobotDescription
{
  std::string name = "panda";
  std::vector<BaseLink> base_links;
  std::string end_effector_frame = kVirtualFlange;
  bool gripper_present = false;
  std::optional<ToolDesign> tool;

  const BaseLink * find_base_link(const std::string & name) const;
  /// Pose of a base frame relative to the end-effector frame.
  Pose frame_in_end_effector(const std::string & frame) const;
};

bool approx_equal(const RobotDescription & a, const RobotDescription & b, double tol = 1e-9);

RobotDescription blank_robot(bool with_gripper);

/// Parses a sequence of `<link>`/`<joint>` elements (an enclosing `<robot>`
/// is accepted but not required) and validates the result.
ToolDesign parse_tool_fragment(const std::string & text);

/// Throws ValidationError if the design breaks any tool invariant.
void validate(const ToolDesign & tool);

std::string serialize_tool_fragment(const ToolDesign & tool);

std::string serialize_robot(const RobotDescription & robot);
RobotDescription parse_robot(const std::string & text);

/// Appends the tool's links and joints to a tool-less robot.
RobotDescription merge(const RobotDescription & robot, const ToolDesign & tool);

/// World-frame boxes of every tool link, in link order.
std::vector<OrientedBox> tool_boxes(
  const ToolDesign & tool, const Pose & ee_pose, const RobotDescription & robot);
std::vector<OrientedBox> tool_boxes(const ToolDesign & tool, const Pose & ee_pose);

/// Box enclosing all tool geometry; an empty tool gives the degenerate box at
/// the end-effector origin.
Aabb tool_bounding_box(const ToolDesign & tool, const Pose & ee_pose);

}  // namespace toolsmith
