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

#include <random>

#include "doctest.h"

#include "toolsmith/collision.hpp"

using namespace toolsmith;

namespace
{

OrientedBox box(const Vec3 & c, const Vec3 & h, const Vec3 & rpy = Vec3::Zero())
{
  return OrientedBox::from_pose(Pose{c, euler_to_quaternion(rpy)}, h);
}

}  // namespace

TEST_CASE("axis-aligned boxes separate along the shallowest axis")
{
  const auto c = penetration(box(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.1)), box(Vec3(0.15, 0.02, 0), Vec3(0.1, 0.1, 0.1)));
  REQUIRE(c);
  CHECK(c->depth == doctest::Approx(0.05));
  CHECK(c->normal.isApprox(Vec3::UnitX()));
  CHECK_FALSE(penetration(box(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.1)), box(Vec3(0.2, 0, 0), Vec3(0.1, 0.1, 0.1))));
  CHECK_FALSE(penetration(box(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.1)), box(Vec3(0.3, 0, 0), Vec3(0.1, 0.1, 0.1))));
}

TEST_CASE("moving by the contact removes the overlap")
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Primitive a = box(Vec3(u(rng), u(rng), u(rng)) * 0.05, Vec3(0.05, 0.04, 0.03) + Vec3(u(rng), u(rng), u(rng)).cwiseAbs() * 0.03,
                            Vec3(u(rng), u(rng), u(rng)) * 3);
    Primitive b;
    if (i % 2 == 0) {
      b = box(Vec3(u(rng), u(rng), u(rng)) * 0.08, Vec3(0.03, 0.03, 0.03), Vec3(u(rng), u(rng), u(rng)) * 3);
    } else {
      b = Ball{Vec3(u(rng), u(rng), u(rng)) * 0.08, 0.03};
    }
    const auto c = penetration(a, b);
    if (!c) {
      continue;
    }
    CHECK(std::abs(c->normal.norm() - 1.0) < 1e-9);
    const Primitive moved = translated(b, c->normal * (c->depth + 1e-7));
    CHECK_FALSE(penetration(a, moved, 1e-9));
  }
}

TEST_CASE("balls")
{
  const auto c = penetration(Ball{Vec3::Zero(), 0.1}, Ball{Vec3(0.15, 0, 0), 0.1});
  REQUIRE(c);
  CHECK(c->depth == doctest::Approx(0.05));
  CHECK(c->normal.isApprox(Vec3::UnitX()));
  const auto d = penetration(box(Vec3::Zero(), Vec3(0.1, 0.1, 0.1)), Ball{Vec3(0, 0, 0.12), 0.05});
  REQUIRE(d);
  CHECK(d->depth == doctest::Approx(0.03));
  CHECK(d->normal.isApprox(Vec3::UnitZ()));
  // Centre inside the box: leave through the nearest face.
  const auto e = penetration(box(Vec3::Zero(), Vec3(0.1, 0.1, 0.1)), Ball{Vec3(0, 0.08, 0), 0.01});
  REQUIRE(e);
  CHECK(e->normal.isApprox(Vec3::UnitY()));
  CHECK(e->depth == doctest::Approx(0.03));
}

TEST_CASE("touching is not a contact")
{
  CHECK_FALSE(penetration(box(Vec3::Zero(), Vec3(0.1, 0.1, 0.1)), box(Vec3(0.2, 0, 0), Vec3(0.1, 0.1, 0.1))));
  CHECK_FALSE(penetration(Ball{Vec3::Zero(), 0.1}, Ball{Vec3(0.2, 0, 0), 0.1}));
}

TEST_CASE("ray against box")
{
  const OrientedBox b = box(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.1));
  const auto t = ray_hit(b, Vec3(0, 0, 1), -Vec3::UnitZ());
  REQUIRE(t);
  CHECK(*t == doctest::Approx(0.9));
  CHECK_FALSE(ray_hit(b, Vec3(0.2, 0, 1), -Vec3::UnitZ()));
  CHECK_FALSE(ray_hit(b, Vec3(0, 0, 1), Vec3::UnitZ()));
  const OrientedBox tilted = box(Vec3::Zero(), Vec3(0.1, 0.1, 0.1), Vec3(0, 0, M_PI / 4));
  CHECK(ray_hit(tilted, Vec3(0.13, 0, 1), -Vec3::UnitZ()));
}

TEST_CASE("deepest contact and bounds")
{
  const std::vector<Primitive> walls{box(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.1)), box(Vec3(1, 0, 0), Vec3(0.1, 0.1, 0.1))};
  const std::vector<Primitive> obj{box(Vec3(0.95, 0, 0), Vec3(0.1, 0.1, 0.1))};
  const auto c = deepest_contact(walls, obj);
  REQUIRE(c);
  CHECK(c->depth == doctest::Approx(0.15));
  const Aabb all = bounds(walls);
  CHECK(all.min.isApprox(Vec3(-0.1, -0.1, -0.1)));
  CHECK(all.max.isApprox(Vec3(1.1, 0.1, 0.1)));
  const Aabb ball = bounds(Primitive{Ball{Vec3(1, 2, 3), 0.5}});
  CHECK(ball.min.isApprox(Vec3(0.5, 1.5, 2.5)));
}
