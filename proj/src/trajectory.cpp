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

#include "toolsmith/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace toolsmith
{
namespace
{

std::optional<int> gripper_bit(double v, std::size_t row)
{
  const double r = std::round(v);
  if (!std::isfinite(v) || std::abs(v - r) > 1e-9 || (r != 0.0 && r != 1.0)) {
    throw InvalidPlan("row " + std::to_string(row) + ": gripper value must be 0 or 1");
  }
  return static_cast<int>(r);
}

}  // namespace

ActionPlan::ActionPlan(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints))
{
  if (waypoints_.empty()) {
    throw InvalidPlan("plan needs at least one waypoint");
  }
  uses_gripper_ = waypoints_.front().gripper.has_value();
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const auto & w = waypoints_[i];
    if (!w.position.allFinite() || !w.rpy.allFinite()) {
      throw InvalidPlan("waypoint " + std::to_string(i) + " is not finite");
    }
    if (w.gripper.has_value() != uses_gripper_) {
      throw InvalidPlan("waypoint " + std::to_string(i) + " has a different width from the first");
    }
    if (w.gripper && *w.gripper != 0 && *w.gripper != 1) {
      throw InvalidPlan("waypoint " + std::to_string(i) + ": gripper value must be 0 or 1");
    }
  }
}

ActionPlan ActionPlan::from_rows(const std::vector<std::vector<double>> & rows)
{
  std::vector<Waypoint> waypoints;
  waypoints.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto & r = rows[i];
    if (r.size() != 6 && r.size() != 7) {
      throw InvalidPlan(
        "row " + std::to_string(i) + " has " + std::to_string(r.size()) + " numbers; expected 6 or 7");
    }
    Waypoint w;
    w.position = Vec3(r[0], r[1], r[2]);
    w.rpy = Vec3(r[3], r[4], r[5]);
    if (r.size() == 7) {
      w.gripper = gripper_bit(r[6], i);
    }
    waypoints.push_back(w);
  }
  return ActionPlan(std::move(waypoints));
}

ActionPlan ActionPlan::from_json(const nlohmann::json & j)
{
  if (!j.is_array()) {
    throw InvalidPlan("plan must be a JSON array of rows");
  }
  std::vector<std::vector<double>> rows;
  for (const auto & row : j) {
    if (!row.is_array()) {
      throw InvalidPlan("plan rows must be arrays");
    }
    std::vector<double> values;
    for (const auto & v : row) {
      if (!v.is_number()) {
        throw InvalidPlan("plan entries must be numbers");
      }
      values.push_back(v.get<double>());
    }
    rows.push_back(std::move(values));
  }
  return from_rows(rows);
}

std::vector<std::vector<double>> ActionPlan::to_rows() const
{
  std::vector<std::vector<double>> rows;
  for (const auto & w : waypoints_) {
    std::vector<double> r{w.position.x(), w.position.y(), w.position.z(), w.rpy.x(), w.rpy.y(), w.rpy.z()};
    if (w.gripper) {
      r.push_back(*w.gripper);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json ActionPlan::to_json() const
{
  nlohmann::json j = nlohmann::json::array();
  for (const auto & w : waypoints_) {
    nlohmann::json row = {w.position.x(), w.position.y(), w.position.z(), w.rpy.x(), w.rpy.y(), w.rpy.z()};
    if (w.gripper) {
      row.push_back(*w.gripper);
    }
    j.push_back(std::move(row));
  }
  return j;
}

Quat slerp(const Quat & from, const Quat & to, double t)
{
  if (t <= 0.0) {
    return from;
  }
  if (t >= 1.0) {
    return to;
  }
  Quat target = to;
  double cos_theta = from.dot(to);
  if (cos_theta < 0.0) {
    target.coeffs() = -target.coeffs();
    cos_theta = -cos_theta;
  }
  double w_from = 1.0 - t;
  double w_to = t;
  if (cos_theta < 1.0 - 1e-12) {
    const double theta = std::acos(cos_theta);
    const double sin_theta = std::sin(theta);
    w_from = std::sin((1.0 - t) * theta) / sin_theta;
    w_to = std::sin(t * theta) / sin_theta;
  }
  Quat out;
  out.coeffs() = w_from * from.coeffs() + w_to * target.coeffs();
  return out.normalized();
}

DenseTrajectory densify(const ActionPlan & plan, double step_max, double angle_step_max)
{
  if (!(step_max > 0.0) || !(angle_step_max > 0.0)) {
    throw InvalidPlan("step bounds must be positive");
  }
  const auto & wps = plan.waypoints();
  if (wps.empty()) {
    throw InvalidPlan("plan needs at least one waypoint");
  }
  DenseTrajectory traj;
  traj.uses_gripper = plan.uses_gripper();
  traj.step_max = step_max;
  traj.angle_step_max = angle_step_max;

  auto closed = [](const Waypoint & w) { return w.gripper.value_or(0) == 1; };
  std::vector<Quat> orientations;
  orientations.reserve(wps.size());
  for (const auto & w : wps) {
    orientations.push_back(euler_to_quaternion(w.rpy));
  }

  traj.samples.push_back(
    TrajectorySample{0, Pose{wps[0].position, orientations[0]}, closed(wps[0]), 0, std::size_t{0}});
  for (std::size_t s = 0; s + 1 < wps.size(); ++s) {
    const Vec3 & a = wps[s].position;
    const Vec3 & b = wps[s + 1].position;
    const double length = (b - a).norm();
    const double angle = angular_distance(orientations[s], orientations[s + 1]);
    const auto steps = static_cast<std::size_t>(std::max(
      {1.0, std::ceil(length / step_max), std::ceil(angle / angle_step_max)}));
    for (std::size_t k = 1; k <= steps; ++k) {
      TrajectorySample sample;
      sample.index = traj.samples.size();
      sample.segment = s;
      if (k == steps) {
        sample.pose = Pose{b, orientations[s + 1]};
        sample.gripper_closed = closed(wps[s + 1]);
        sample.waypoint = s + 1;
      } else {
        const double t = static_cast<double>(k) / static_cast<double>(steps);
        sample.pose = Pose{a + (b - a) * t, slerp(orientations[s], orientations[s + 1], t)};
        sample.gripper_closed = closed(wps[s]);
      }
      traj.samples.push_back(sample);
    }
  }
  return traj;
}

double path_length(const DenseTrajectory & traj)
{
  double total = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    total += (traj.samples[i].pose.position - traj.samples[i - 1].pose.position).norm();
  }
  return total;
}

}  // namespace toolsmith
