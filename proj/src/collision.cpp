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

#include "toolsmith/collision.hpp"

#include <cmath>
#include <limits>

namespace toolsmith
{
namespace
{

std::optional<Contact> box_box(const OrientedBox & a, const OrientedBox & b, double tol)
{
  const Vec3 delta = b.center - a.center;
  std::optional<Contact> best;
  auto test_axis = [&](Vec3 axis, bool face) -> bool {
    const double n = axis.norm();
    if (n < 1e-9) {
      return true;
    }
    axis /= n;
    const double ra = (a.rotation.transpose() * axis).cwiseAbs().dot(a.half_extents);
    const double rb = (b.rotation.transpose() * axis).cwiseAbs().dot(b.half_extents);
    const double d = delta.dot(axis);
    const double overlap = ra + rb - std::abs(d);
    if (overlap <= tol) {
      return false;
    }
    // Edge-edge axes only win when clearly shallower than the face axes.
    const double margin = face ? 0.0 : 1e-9;
    if (!best || overlap < best->depth - margin) {
      best = Contact{d >= 0.0 ? axis : Vec3(-axis), overlap};
    }
    return true;
  };
  for (int i = 0; i < 3; ++i) {
    if (!test_axis(a.rotation.col(i), true)) {
      return std::nullopt;
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (!test_axis(b.rotation.col(i), true)) {
      return std::nullopt;
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (!test_axis(a.rotation.col(i).cross(b.rotation.col(j)), false)) {
        return std::nullopt;
      }
    }
  }
  return best;
}

// Contact pushing the ball out of the box.
std::optional<Contact> box_ball(const OrientedBox & box, const Ball & ball, double tol)
{
  const Vec3 local = box.to_local(ball.center);
  const Vec3 clamped = local.cwiseMax(-box.half_extents).cwiseMin(box.half_extents);
  const Vec3 diff = local - clamped;
  const double dist = diff.norm();
  if (dist > 0.0) {
    const double depth = ball.radius - dist;
    if (depth <= tol) {
      return std::nullopt;
    }
    return Contact{box.rotation * (diff / dist), depth};
  }
  int axis = 0;
  double room = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double r = box.half_extents[i] - std::abs(local[i]);
    if (r < room) {
      room = r;
      axis = i;
    }
  }
  const double sign = local[axis] >= 0.0 ? 1.0 : -1.0;
  return Contact{sign * box.rotation.col(axis), room + ball.radius};
}

std::optional<Contact> ball_ball(const Ball & a, const Ball & b, double tol)
{
  const Vec3 d = b.center - a.center;
  const double dist = d.norm();
  const double depth = a.radius + b.radius - dist;
  if (depth <= tol) {
    return std::nullopt;
  }
  return Contact{dist > 1e-12 ? Vec3(d / dist) : Vec3::UnitZ(), depth};
}

}  // namespace

std::optional<Contact> penetration(const Primitive & a, const Primitive & b, double tol)
{
  if (!bounds(a).overlaps(bounds(b))) {
    return std::nullopt;
  }
  if (const auto * ba = std::get_if<OrientedBox>(&a)) {
    if (const auto * bb = std::get_if<OrientedBox>(&b)) {
      return box_box(*ba, *bb, tol);
    }
    return box_ball(*ba, std::get<Ball>(b), tol);
  }
  const auto & sa = std::get<Ball>(a);
  if (const auto * bb = std::get_if<OrientedBox>(&b)) {
    auto c = box_ball(*bb, sa, tol);
    if (c) {
      c->normal = -c->normal;
    }
    return c;
  }
  return ball_ball(sa, std::get<Ball>(b), tol);
}

Aabb bounds(const Primitive & p)
{
  if (const auto * box = std::get_if<OrientedBox>(&p)) {
    return box->aabb();
  }
  const auto & ball = std::get<Ball>(p);
  const Vec3 r = Vec3::Constant(ball.radius);
  return Aabb{ball.center - r, ball.center + r};
}

Aabb bounds(const std::vector<Primitive> & parts)
{
  Aabb out;
  for (const auto & p : parts) {
    out.expand(bounds(p));
  }
  return out;
}

std::optional<Contact> deepest_contact(
  const std::vector<Primitive> & obstacles, const std::vector<Primitive> & movable, double tol)
{
  std::optional<Contact> best;
  for (const auto & o : obstacles) {
    for (const auto & m : movable) {
      const auto c = penetration(o, m, tol);
      if (c && (!best || c->depth > best->depth)) {
        best = c;
      }
    }
  }
  return best;
}

std::optional<double> ray_hit(const OrientedBox & box, const Vec3 & origin, const Vec3 & direction)
{
  const Vec3 o = box.to_local(origin);
  const Vec3 d = box.rotation.transpose() * direction;
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-12) {
      if (std::abs(o[i]) > box.half_extents[i]) {
        return std::nullopt;
      }
      continue;
    }
    double t1 = (-box.half_extents[i] - o[i]) / d[i];
    double t2 = (box.half_extents[i] - o[i]) / d[i];
    if (t1 > t2) {
      std::swap(t1, t2);
    }
    t_min = std::max(t_min, t1);
    t_max = std::min(t_max, t2);
    if (t_min > t_max) {
      return std::nullopt;
    }
  }
  return t_min;
}

Primitive translated(const Primitive & p, const Vec3 & offset)
{
  if (const auto * box = std::get_if<OrientedBox>(&p)) {
    OrientedBox out = *box;
    out.center += offset;
    return out;
  }
  Ball out = std::get<Ball>(p);
  out.center += offset;
  return out;
}

}  // namespace toolsmith
