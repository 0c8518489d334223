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

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "doctest.h"

#include "toolsmith/scene_io.hpp"
#include "toolsmith/tasks.hpp"

using namespace toolsmith;

namespace
{

void move_to(SceneState & s, const std::string & id, const Vec3 & p) { s.objects.at(id).pose.position = p; }

void raise(SceneState & s, const std::string & prefix, double dz)
{
  for (auto & [id, o] : s.objects) {
    if (id.rfind(prefix, 0) == 0) {
      o.pose.position.z() += dz;
    }
  }
}

void put_all(SceneState & s, const std::string & prefix, const Vec3 & p)
{
  for (auto & [id, o] : s.objects) {
    if (id.rfind(prefix, 0) == 0) {
      o.pose.position = p;
    }
  }
}

// A hand-built final state that fully solves each task.
const std::map<std::string, std::function<void(SceneState &)>> & solutions()
{
  static const std::map<std::string, std::function<void(SceneState &)>> m{
    {"BringCube", [](SceneState & s) { move_to(s, "cube", s.at("target").pose.position + Vec3(0, 0, 0.02)); }},
    {"CleanTable", [](SceneState & s) { put_all(s, "dust_", s.at("goal_zone").pose.position); }},
    {"DislodgeCube", [](SceneState & s) { move_to(s, "cube", Vec3(0.40, 0.0, 0.02)); }},
    {"ElevatePlate", [](SceneState & s) { raise(s, "plate", 0.3); }},
    {"GatherSpheres", [](SceneState & s) { raise(s, "sphere_", 0.35); }},
    {"HighObject", [](SceneState & s) { move_to(s, "cube", s.at("box_interior").pose.position); }},
    {"LiftBox", [](SceneState & s) { raise(s, "box", 0.25); }},
    {"MoveBall", [](SceneState & s) { move_to(s, "ball", s.at("target").pose.position + Vec3(0, 0, 0.03)); }},
    {"OneBook", [](SceneState & s) { s.objects.at("book_2").pose.position.x() -= 0.25; }},
    {"ScoreGoal", [](SceneState & s) { move_to(s, "puck", s.at("goal_volume").pose.position); }},
    {"SnatchCookie", [](SceneState & s) { raise(s, "cookie_2", 0.3); }},
    {"TurkeyLegs", [](SceneState & s) { put_all(s, "leg_", s.at("chef_box_interior").pose.position); }},
  };
  return m;
}

}  // namespace

TEST_CASE("registry matches the hyperparameter table")
{
  const std::vector<std::pair<std::string, EvolutionConfig>> expected{
    {"BringCube", {20, 10, 10, 5, 0.6, 3, 100}},    {"CleanTable", {20, 10, 10, 5, 0.6, 3, 100}},
    {"DislodgeCube", {20, 10, 10, 5, 0.6, 3, 100}}, {"ElevatePlate", {20, 10, 10, 5, 0.6, 3, 100}},
    {"GatherSpheres", {20, 10, 10, 5, 0.6, 3, 100}}, {"HighObject", {20, 10, 10, 5, 0.5, 3, 100}},
    {"LiftBox", {30, 15, 15, 5, 0.1, 3, 100}},      {"MoveBall", {20, 10, 10, 5, 0.6, 3, 100}},
    {"OneBook", {20, 10, 10, 5, 0.4, 3, 100}},      {"ScoreGoal", {20, 10, 10, 5, 0.4, 3, 100}},
    {"SnatchCookie", {5, 5, 5, 5, 0.3, 3, 100}},    {"TurkeyLegs", {30, 10, 15, 5, 0.2, 4, 100}},
  };
  REQUIRE(task_names().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(expected[i].first);
    CHECK(task_names()[i] == expected[i].first);
    CHECK(default_config(expected[i].first) == expected[i].second);
    CHECK_NOTHROW(default_config(expected[i].first).validate());
  }
  const std::vector<std::string> gripper{"ElevatePlate", "GatherSpheres", "HighObject", "LiftBox",
                                         "OneBook",      "SnatchCookie",  "TurkeyLegs"};
  for (const auto & name : task_names()) {
    CAPTURE(name);
    const bool want = std::find(gripper.begin(), gripper.end(), name) != gripper.end();
    CHECK(get_task(name).gripper_allowed == want);
    CHECK_FALSE(get_task(name).description.empty());
  }
}

TEST_CASE("unknown tasks and bad configs")
{
  CHECK_THROWS_AS(get_task("NoSuchTask"), NotFound);
  CHECK_THROWS_AS(apply_overrides(EvolutionConfig{}, nlohmann::json{{"n_agents", 2}}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(EvolutionConfig{}, nlohmann::json{{"n_agent", 0}}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(EvolutionConfig{}, nlohmann::json{{"reward_save", 1.5}}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(EvolutionConfig{}, nlohmann::json{{"k_top", 2}}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(RewardConstants{}, nlohmann::json{{"nope", 1.0}}), ConfigError);
  const EvolutionConfig c = apply_overrides(default_config("BringCube"), nlohmann::json{{"n_iteration", 5}});
  CHECK(c.n_iteration == 5);
  CHECK(c.n_agent == 20);
}

TEST_CASE("doing nothing earns nothing")
{
  for (const auto & name : task_names()) {
    CAPTURE(name);
    const TaskSpec & t = get_task(name);
    for (std::uint64_t seed : {0, 1, 2}) {
      const SceneState s = build_scene(t, seed);
      CHECK(t.reward(s, s) == 0.0);
    }
  }
}

TEST_CASE("solved states saturate the reward")
{
  for (const auto & name : task_names()) {
    CAPTURE(name);
    const TaskSpec & t = get_task(name);
    const SceneState s = build_scene(t, 0);
    SceneState f = s;
    solutions().at(name)(f);
    CHECK(t.reward(s, f) == doctest::Approx(1.0));
  }
}

TEST_CASE("rewards stay in the unit interval")
{
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 0.15);
  std::uniform_real_distribution<double> speed(0.0, 2.0);
  int pairs = 0;
  for (const auto & name : task_names()) {
    const TaskSpec & t = get_task(name);
    const SceneState base = build_scene(t, 0);
    for (int i = 0; i < 8400; ++i) {
      SceneState a = base;
      SceneState b = base;
      if (i % 2 == 1) {
        solutions().at(name)(b);
      }
      for (auto & [id, o] : b.objects) {
        if (o.movable) {
          o.pose.position += Vec3(n(rng), n(rng), n(rng));
          o.held_speed = speed(rng);
        }
      }
      const double r = t.reward_fn(a, b, t.constants);
      if (!(r >= 0.0 && r <= 1.0)) {
        FAIL_CHECK(name << " gave " << r);
      }
      ++pairs;
    }
  }
  CHECK(pairs >= 100000);
}

TEST_CASE("distance terms are monotone")
{
  const TaskSpec & t = get_task("BringCube");
  const SceneState s = build_scene(t, 0);
  const Vec3 target = s.at("target").pose.position;
  const Vec3 start = s.at("cube").pose.position;
  double last = -1.0;
  for (int i = 0; i <= 50; ++i) {
    SceneState f = s;
    const Vec3 p = start + (target - start) * (i / 50.0);
    move_to(f, "cube", Vec3(p.x(), p.y(), 0.02));
    const double r = t.reward(s, f);
    CHECK(r >= last);
    last = r;
  }
  CHECK(last == doctest::Approx(1.0));

  const TaskSpec & lift = get_task("LiftBox");
  const SceneState l = build_scene(lift, 0);
  last = -1.0;
  for (int i = 0; i <= 30; ++i) {
    SceneState f = l;
    raise(f, "box", 0.01 * i);
    const double r = lift.reward(l, f);
    CHECK(r >= last);
    last = r;
  }
}

TEST_CASE("bring cube worked example")
{
  const TaskSpec & t = get_task("BringCube");
  SceneState s = build_scene(t, 0);
  const Vec3 target = s.at("target").pose.position;
  move_to(s, "cube", target + Vec3(0.8, 0, 0.02));
  SceneState f = s;
  move_to(f, "cube", target + Vec3(0.2, 0, 0.02));
  CHECK(t.reward(s, f) == doctest::Approx(0.75));
}

TEST_CASE("moving the pot or a neighbouring book voids the reward")
{
  const TaskSpec & legs = get_task("TurkeyLegs");
  const SceneState s = build_scene(legs, 0);
  SceneState f = s;
  solutions().at("TurkeyLegs")(f);
  f.objects.at("pot").pose.position.x() += 0.05;
  CHECK(legs.reward(s, f) == 0.0);

  const TaskSpec & book = get_task("OneBook");
  const SceneState b = build_scene(book, 0);
  SceneState g = b;
  solutions().at("OneBook")(g);
  g.objects.at("book_1").pose.position.x() -= 0.02;
  CHECK(book.reward(b, g) == 0.0);
}

TEST_CASE("fast ball loses the speed term")
{
  const TaskSpec & t = get_task("MoveBall");
  const SceneState s = build_scene(t, 0);
  SceneState f = s;
  solutions().at("MoveBall")(f);
  f.objects.at("ball").held_speed = 10.0;
  CHECK(t.reward(s, f) == doctest::Approx(t.constants.move_ball_w1));
}

TEST_CASE("scene layouts")
{
  const SceneState bring = build_scene(get_task("BringCube"), 0);
  const Vec3 c = bring.at("cube").pose.position;
  CHECK(std::hypot(c.x(), c.y()) > kWorkspaceRadius);

  const SceneState gather = build_scene(get_task("GatherSpheres"), 0);
  int spheres = 0;
  for (const auto & [id, o] : gather.objects) {
    if (id.rfind("sphere_", 0) == 0) {
      ++spheres;
      CHECK(o.bounds().max.z() < 0.05);
    }
  }
  CHECK(spheres == 9);
  CHECK(std::get<CompositeShape>(gather.at("container").shape).parts.size() == 3);

  const SceneState score = build_scene(get_task("ScoreGoal"), 0);
  const Vec3 puck = score.at("puck").pose.position;
  CHECK(std::hypot(puck.x(), puck.y()) > kWorkspaceRadius);
}

TEST_CASE("scenes are deterministic and seed 0 matches the shipped files")
{
  for (const auto & name : task_names()) {
    CAPTURE(name);
    const TaskSpec & t = get_task(name);
    CHECK(identical(build_scene(t, 7), build_scene(t, 7)));
    CHECK(identical(load_scene(data_dir() / "scenes" / (name + ".json")), build_scene(t, 0)));
  }
}

TEST_CASE("shipped reward constants equal the defaults")
{
  CHECK(load_reward_constants(data_dir() / "reward_constants.json") == RewardConstants{});
  CHECK(to_json(RewardConstants{}).size() == 11);
}

TEST_CASE("custom task from a scene file")
{
  const TaskSpec t =
    custom_task("MyCube", data_dir() / "scenes" / "BringCube.json", "BringCube", EvolutionConfig{2, 1, 1, 1, 0.5, 1, 1});
  CHECK(t.name == "MyCube");
  CHECK(identical(build_scene(t, 5), build_scene(get_task("BringCube"), 0)));
  CHECK_THROWS_AS(custom_task("X", data_dir() / "scenes" / "BringCube.json", "Nope", {}), NotFound);
}
