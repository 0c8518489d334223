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
#include <variant>
#include <vector>

#include "toolsmith/geometry.hpp"

namespace toolsmith
{

struct Ball
{
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

using Primitive = std::variant<OrientedBox, Ball>;

/// Minimum translation separating two primitives: moving `b` by
/// `normal * depth` removes the overlap. `normal` is a unit vector.
struct Contact
{
  Vec3 normal = Vec3::UnitZ();
  double depth = 0.0;
};

/// Overlaps shallower than `tol` (including touching) report no contact.
std::optional<Contact> penetration(const Primitive & a, const Primitive & b, double tol = 1e-9);

Aabb bounds(const Primitive & p);
Aabb bounds(const std::vector<Primitive> & parts);

/// Deepest contact pushing `movable` out of `obstacles`.
std::optional<Contact> deepest_contact(
  const std::vector<Primitive> & obstacles, const std::vector<Primitive> & movable, double tol = 1e-9);

/// Distance along a unit ray to the first intersection with the box, if any.
std::optional<double> ray_hit(const OrientedBox & box, const Vec3 & origin, const Vec3 & direction);

Primitive translated(const Primitive & p, const Vec3 & offset);

}  // namespace toolsmith
