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
#include <limits>
#include <vector>

#include <Eigen/Geometry>

namespace toolsmith
{
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform: rotation followed by translation.
struct Pose
{
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Pose() = default;
  Pose(const Vec3 & p, const Quat & q) : position(p), orientation(q) {}
  static Pose identity() { return Pose{}; }
  static Pose translation(const Vec3 & p) { return Pose{p, Quat::Identity()}; }

  Vec3 apply(const Vec3 & point) const { return orientation * point + position; }
  Pose inverse() const;
  Pose operator*(const Pose & rhs) const;
  Mat3 rotation() const { return orientation.toRotationMatrix(); }
};

bool operator==(const Pose & a, const Pose & b);

/// Axis-aligned box. A default-constructed box is empty (min > max).
struct Aabb
{
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  static Aabb from_point(const Vec3 & p) { return Aabb{p, p}; }
  bool empty() const { return (min.array() > max.array()).any(); }
  void expand(const Vec3 & p);
  void expand(const Aabb & other);
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 size() const { return max - min; }
  bool contains(const Vec3 & p, double tol = 0.0) const;
  bool contains(const Aabb & other, double tol = 0.0) const;
  /// True when the boxes intersect or lie within `tol` of each other on every axis.
  bool overlaps(const Aabb & other, double tol = 0.0) const;
  /// Signed separation along the worst axis; negative means interpenetration.
  double separation(const Aabb & other) const;
};

struct OrientedBox
{
  Vec3 center = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  Vec3 half_extents = Vec3::Zero();

  static OrientedBox from_pose(const Pose & pose, const Vec3 & half_extents);
  std::array<Vec3, 8> corners() const;
  Aabb aabb() const;
  /// Point in box-local coordinates.
  Vec3 to_local(const Vec3 & p) const { return rotation.transpose() * (p - center); }
};

/// Extrinsic X-Y-Z (roll about world x, then pitch about world y, then yaw
/// about world z). Same convention as URDF `rpy`.
Quat euler_to_quaternion(const Vec3 & rpy);
/// Inverse of euler_to_quaternion. At gimbal lock (|pitch| = pi/2) roll is
/// fixed to zero and the remaining rotation is reported as yaw.
Vec3 quaternion_to_euler(const Quat & q);

/// Angle of the rotation taking `a` to `b`, in [0, pi].
double angular_distance(const Quat & a, const Quat & b);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace toolsmith
