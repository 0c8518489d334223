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

#include "toolsmith/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace toolsmith
{

Pose Pose::inverse() const
{
  const Quat inv = orientation.conjugate();
  return Pose{-(inv * position), inv};
}

Pose Pose::operator*(const Pose & rhs) const
{
  return Pose{orientation * rhs.position + position, (orientation * rhs.orientation).normalized()};
}

bool operator==(const Pose & a, const Pose & b)
{
  return a.position == b.position && a.orientation.coeffs() == b.orientation.coeffs();
}

void Aabb::expand(const Vec3 & p)
{
  min = min.cwiseMin(p);
  max = max.cwiseMax(p);
}

void Aabb::expand(const Aabb & other)
{
  if (other.empty()) {
    return;
  }
  expand(other.min);
  expand(other.max);
}

bool Aabb::contains(const Vec3 & p, double tol) const
{
  return (p.array() >= min.array() - tol).all() && (p.array() <= max.array() + tol).all();
}

bool Aabb::contains(const Aabb & other, double tol) const
{
  return contains(other.min, tol) && contains(other.max, tol);
}

bool Aabb::overlaps(const Aabb & other, double tol) const
{
  for (int i = 0; i < 3; ++i) {
    if (min[i] > other.max[i] + tol || other.min[i] > max[i] + tol) {
      return false;
    }
  }
  return true;
}

double Aabb::separation(const Aabb & other) const
{
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    worst = std::max(worst, std::max(min[i] - other.max[i], other.min[i] - max[i]));
  }
  return worst;
}

OrientedBox OrientedBox::from_pose(const Pose & pose, const Vec3 & half_extents)
{
  return OrientedBox{pose.position, pose.rotation(), half_extents};
}

std::array<Vec3, 8> OrientedBox::corners() const
{
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 sign((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    out[i] = center + rotation * sign.cwiseProduct(half_extents);
  }
  return out;
}

Aabb OrientedBox::aabb() const
{
  const Vec3 reach = rotation.cwiseAbs() * half_extents;
  return Aabb{center - reach, center + reach};
}

Quat euler_to_quaternion(const Vec3 & rpy)
{
  const Quat qx(Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()));
  const Quat qy(Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()));
  const Quat qz(Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()));
  return (qz * qy * qx).normalized();
}

Vec3 quaternion_to_euler(const Quat & q)
{
  const Mat3 r = q.normalized().toRotationMatrix();
  const double cos_pitch = std::hypot(r(0, 0), r(1, 0));
  const double pitch = std::atan2(-r(2, 0), cos_pitch);
  if (cos_pitch < 1e-12) {
    // gimbal lock: roll and yaw share an axis
    return Vec3(0.0, pitch, std::atan2(-r(0, 1), r(1, 1)));
  }
  return Vec3(std::atan2(r(2, 1), r(2, 2)), pitch, std::atan2(r(1, 0), r(0, 0)));
}

double angular_distance(const Quat & a, const Quat & b)
{
  const double d = std::min(1.0, std::abs(a.normalized().dot(b.normalized())));
  return 2.0 * std::acos(d);
}

double wrap_angle(double a)
{
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) {
    a += 2.0 * M_PI;
  }
  return a;
}

}  // namespace toolsmith
