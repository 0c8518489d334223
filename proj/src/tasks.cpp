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

#include "toolsmith/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <random>

#include "toolsmith/scene_io.hpp"

namespace toolsmith
{
namespace
{

using Rgba = std::array<double, 4>;

const Rgba kRed{0.85, 0.1, 0.1, 1.0};
const Rgba kGreen{0.1, 0.7, 0.2, 1.0};
const Rgba kWhite{0.92, 0.92, 0.92, 1.0};
const Rgba kGlass{0.75, 0.85, 0.9, 0.4};
const Rgba kWood{0.55, 0.4, 0.25, 1.0};
const Rgba kBeige{0.87, 0.8, 0.65, 1.0};
const Rgba kPurple{0.5, 0.2, 0.7, 1.0};
const Rgba kSilver{0.7, 0.7, 0.72, 1.0};
const Rgba kMarker{0.2, 0.8, 0.3, 0.3};

SceneObject box(const std::string & id, const Vec3 & center, const Vec3 & half, bool movable, const Rgba & color)
{
  SceneObject o;
  o.id = id;
  o.shape = BoxShape{half};
  o.pose = Pose::translation(center);
  o.movable = movable;
  o.color = color;
  return o;
}

SceneObject sphere(const std::string & id, const Vec3 & center, double radius, bool movable, const Rgba & color)
{
  SceneObject o;
  o.id = id;
  o.shape = SphereShape{radius};
  o.pose = Pose::translation(center);
  o.movable = movable;
  o.color = color;
  return o;
}

SceneObject marker(SceneObject o)
{
  o.movable = false;
  o.collidable = false;
  return o;
}

// Parts are given relative to `origin`.
SceneObject composite(
  const std::string & id, const Vec3 & origin, const std::vector<std::pair<Vec3, Vec3>> & parts, bool movable,
  const Rgba & color)
{
  SceneObject o;
  o.id = id;
  CompositeShape shape;
  for (const auto & [center, half] : parts) {
    shape.parts.push_back(BoxPart{Pose::translation(center), half});
  }
  o.shape = shape;
  o.pose = Pose::translation(origin);
  o.movable = movable;
  o.color = color;
  return o;
}

// Open-top box: floor plus four walls around an inner region.
std::vector<std::pair<Vec3, Vec3>> open_box_parts(double inner_hx, double inner_hy, double height, double wall)
{
  const double hz = 0.5 * height;
  return {
    {Vec3(0, 0, 0.5 * wall), Vec3(inner_hx + wall, inner_hy + wall, 0.5 * wall)},
    {Vec3(inner_hx + 0.5 * wall, 0, hz), Vec3(0.5 * wall, inner_hy + wall, hz)},
    {Vec3(-inner_hx - 0.5 * wall, 0, hz), Vec3(0.5 * wall, inner_hy + wall, hz)},
    {Vec3(0, inner_hy + 0.5 * wall, hz), Vec3(inner_hx, 0.5 * wall, hz)},
    {Vec3(0, -inner_hy - 0.5 * wall, hz), Vec3(inner_hx, 0.5 * wall, hz)},
  };
}

void add(SceneState & s, SceneObject o)
{
  const std::string id = o.id;
  s.objects.emplace(id, std::move(o));
}

SceneState empty_scene()
{
  SceneState s;
  s.ee_pose = Pose::translation(Vec3(0.3, 0.0, 0.5));
  return s;
}

// Seed 0 is the canonical layout; other seeds shift all movables together.
void jitter(SceneState & s, std::uint64_t seed, bool along_y = true)
{
  if (seed == 0) {
    return;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  const double dx = u(rng);
  const double dy = u(rng);
  const Vec3 offset(dx, along_y ? dy : 0.0, 0.0);
  for (auto & [id, o] : s.objects) {
    if (o.movable) {
      o.pose.position += offset;
    }
  }
}

SceneState bring_cube_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  add(s, box("cube", Vec3(1.05, 0.0, 0.02), Vec3::Constant(0.02), true, kRed));
  add(s, marker(box("target", Vec3(0.45, 0.0, 0.0005), Vec3(0.05, 0.05, 0.0005), false, kMarker)));
  jitter(s, seed);
  return s;
}

SceneState clean_table_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  const std::array<Vec3, 5> spots{
    Vec3(0.45, -0.12, 0.015), Vec3(0.48, 0.0, 0.015), Vec3(0.42, 0.10, 0.015), Vec3(0.52, 0.15, 0.015),
    Vec3(0.50, -0.20, 0.015)};
  const std::array<Rgba, 5> colors{
    Rgba{0.9, 0.2, 0.2, 1}, Rgba{0.2, 0.5, 0.9, 1}, Rgba{0.9, 0.8, 0.1, 1}, Rgba{0.3, 0.8, 0.3, 1},
    Rgba{0.8, 0.3, 0.8, 1}};
  for (std::size_t i = 0; i < spots.size(); ++i) {
    add(s, box("dust_" + std::to_string(i), spots[i], Vec3::Constant(0.015), true, colors[i]));
  }
  add(s, marker(sphere("goal_zone", Vec3(0.75, 0.0, 0.0), 0.12, false, kMarker)));
  jitter(s, seed);
  return s;
}

SceneState dislodge_cube_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  // L-shaped square pipe open toward -x at x = 0.45 and toward -y at y = -0.25.
  add(s, composite("pipe", Vec3::Zero(),
                   {
                     {Vec3(0.5675, 0.0325, 0.035), Vec3(0.1175, 0.0025, 0.035)},
                     {Vec3(0.535, -0.0325, 0.035), Vec3(0.085, 0.0025, 0.035)},
                     {Vec3(0.6825, -0.1075, 0.035), Vec3(0.0025, 0.1425, 0.035)},
                     {Vec3(0.6175, -0.14, 0.035), Vec3(0.0025, 0.11, 0.035)},
                     {Vec3(0.5675, 0.0, 0.0725), Vec3(0.1175, 0.035, 0.0025)},
                     {Vec3(0.65, -0.1425, 0.0725), Vec3(0.035, 0.1075, 0.0025)},
                   },
                   false, kGlass));
  add(s, box("cube", Vec3(0.65, 0.0, 0.02), Vec3::Constant(0.02), true, kRed));
  add(s, marker(box("exit_neg_x", Vec3(0.45, 0.0, 0.035), Vec3(0.001, 0.03, 0.035), false, kMarker)));
  add(s, marker(box("exit_neg_y", Vec3(0.65, -0.25, 0.035), Vec3(0.03, 0.001, 0.035), false, kMarker)));
  jitter(s, seed);
  return s;
}

SceneState elevate_plate_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  add(s, box("plate", Vec3(0.55, 0.0, 0.005), Vec3(0.1, 0.1, 0.005), true, kWhite));
  jitter(s, seed);
  return s;
}

SceneState gather_spheres_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  // Walls on the +x, +y and -y sides; the -x side faces the robot.
  add(s, composite("container", Vec3(0.55, 0.0, 0.0),
                   {
                     {Vec3(0.105, 0.0, 0.025), Vec3(0.005, 0.11, 0.025)},
                     {Vec3(0.0, 0.105, 0.025), Vec3(0.1, 0.005, 0.025)},
                     {Vec3(0.0, -0.105, 0.025), Vec3(0.1, 0.005, 0.025)},
                   },
                   false, kWhite));
  int n = 0;
  for (double x : {0.50, 0.55, 0.60}) {
    for (double y : {-0.05, 0.0, 0.05}) {
      add(s, sphere("sphere_" + std::to_string(n++), Vec3(x, y, 0.015), 0.015, true, kPurple));
    }
  }
  jitter(s, seed);
  return s;
}

SceneState high_object_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  add(s, composite("shelf", Vec3(0.75, 0.0, 0.0),
                   {
                     {Vec3(0.0, 0.0, 0.395), Vec3(0.1, 0.15, 0.005)},
                     {Vec3(0.09, 0.0, 0.195), Vec3(0.01, 0.15, 0.195)},
                   },
                   false, kWood));
  add(s, box("cube", Vec3(0.72, 0.0, 0.42), Vec3::Constant(0.02), true, kGreen));
  add(s, composite("box", Vec3(0.45, 0.0, 0.0), open_box_parts(0.08, 0.08, 0.10, 0.005), false, kBeige));
  add(s, marker(box("box_interior", Vec3(0.45, 0.0, 0.0525), Vec3(0.08, 0.08, 0.0475), false, kMarker)));
  jitter(s, seed);
  return s;
}

SceneState lift_box_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  add(s, box("box", Vec3(0.55, 0.0, 0.06), Vec3(0.1, 0.075, 0.06), true, kWood));
  jitter(s, seed);
  return s;
}

SceneState move_ball_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  add(s, sphere("ball", Vec3(0.5, 0.3, 0.03), 0.03, true, kRed));
  add(s, marker(box("target", Vec3(0.5, -0.3, 0.0005), Vec3(0.05, 0.05, 0.0005), false, kMarker)));
  jitter(s, seed);
  return s;
}

SceneState one_book_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  const std::array<Rgba, 5> covers{
    Rgba{0.2, 0.3, 0.7, 1}, Rgba{0.7, 0.2, 0.2, 1}, Rgba{0.9, 0.7, 0.1, 1}, Rgba{0.2, 0.6, 0.3, 1},
    Rgba{0.4, 0.2, 0.5, 1}};
  for (int i = 0; i < 5; ++i) {
    add(s, box("book_" + std::to_string(i), Vec3(0.6, -0.06 + 0.03 * i, 0.12), Vec3(0.1, 0.015, 0.12), true,
               covers[static_cast<std::size_t>(i)]));
  }
  add(s, box("holder_left", Vec3(0.6, 0.08, 0.1), Vec3(0.1, 0.005, 0.1), false, kSilver));
  add(s, box("holder_right", Vec3(0.6, -0.08, 0.1), Vec3(0.1, 0.005, 0.1), false, kSilver));
  // Books sit snugly between the holders, so only shift along x.
  jitter(s, seed, false);
  return s;
}

SceneState score_goal_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  add(s, box("puck", Vec3(0.9, 0.15, 0.0125), Vec3(0.03, 0.03, 0.0125), true, Rgba{0.1, 0.1, 0.1, 1}));
  // Goal frame opening toward -x: back wall, two side walls and a crossbar.
  add(s, composite("goal", Vec3(1.25, 0.0, 0.0),
                   {
                     {Vec3(0.095, 0.0, 0.075), Vec3(0.005, 0.155, 0.075)},
                     {Vec3(0.0, 0.15, 0.075), Vec3(0.1, 0.005, 0.075)},
                     {Vec3(0.0, -0.15, 0.075), Vec3(0.1, 0.005, 0.075)},
                     {Vec3(0.0, 0.0, 0.1475), Vec3(0.1, 0.145, 0.0025)},
                   },
                   false, kWhite));
  add(s, marker(box("goal_volume", Vec3(1.245, 0.0, 0.0725), Vec3(0.095, 0.145, 0.0725), false, kMarker)));
  jitter(s, seed);
  return s;
}

SceneState snatch_cookie_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  add(s, composite("jar", Vec3(0.55, 0.0, 0.0), open_box_parts(0.05, 0.05, 0.15, 0.005), false, kGlass));
  add(s, marker(box("jar_interior", Vec3(0.55, 0.0, 0.0775), Vec3(0.05, 0.05, 0.0725), false, kMarker)));
  for (int i = 0; i < 3; ++i) {
    add(s, box("cookie_" + std::to_string(i), Vec3(0.55, 0.0, 0.01 + 0.01 * i), Vec3(0.02, 0.02, 0.005), true,
               Rgba{0.75, 0.55, 0.3, 1}));
  }
  jitter(s, seed);
  return s;
}

SceneState turkey_legs_scene(std::uint64_t seed)
{
  SceneState s = empty_scene();
  auto pot = open_box_parts(0.08, 0.08, 0.08, 0.005);
  pot.push_back({Vec3(0.0, 0.105, 0.065), Vec3(0.02, 0.02, 0.005)});
  pot.push_back({Vec3(0.0, -0.105, 0.065), Vec3(0.02, 0.02, 0.005)});
  add(s, composite("pot", Vec3(0.55, 0.0, 0.0), pot, true, kSilver));
  for (int i = 0; i < 3; ++i) {
    add(s, box("leg_" + std::to_string(i), Vec3(0.55, -0.04 + 0.04 * i, 0.02), Vec3(0.04, 0.015, 0.015), true,
               Rgba{0.65, 0.35, 0.15, 1}));
  }
  // The chef's box is on the robot's left (+y).
  add(s, composite("chef_box", Vec3(0.55, 0.32, 0.0), open_box_parts(0.09, 0.09, 0.06, 0.005), false, kWood));
  add(s, marker(box("chef_box_interior", Vec3(0.55, 0.32, 0.0325), Vec3(0.09, 0.09, 0.0275), false, kMarker)));
  jitter(s, seed);
  return s;
}

double clamp01(double v) { return std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0); }

double planar(const Vec3 & a, const Vec3 & b) { return std::hypot(a.x() - b.x(), a.y() - b.y()); }

// 1 - d_final / d_initial, clamped; an object already at its goal counts as done.
double distance_progress(double d_initial, double d_final)
{
  if (d_initial <= 1e-12) {
    return d_final <= 1e-12 ? 1.0 : 0.0;
  }
  return clamp01(1.0 - d_final / d_initial);
}

Vec3 pos(const SceneState & s, const std::string & id) { return s.at(id).pose.position; }

std::vector<std::string> ids_with_prefix(const SceneState & s, const std::string & prefix)
{
  std::vector<std::string> out;
  for (const auto & [id, o] : s.objects) {
    if (id.rfind(prefix, 0) == 0) {
      out.push_back(id);
    }
  }
  return out;
}

double radius_of(const SceneObject & o)
{
  if (const auto * sph = std::get_if<SphereShape>(&o.shape)) {
    return sph->radius;
  }
  return 0.5 * std::min(o.bounds().size().x(), o.bounds().size().y());
}

bool footprint_inside(const Aabb & region, const Vec3 & p)
{
  return p.x() >= region.min.x() && p.x() <= region.max.x() && p.y() >= region.min.y() &&
         p.y() <= region.max.y();
}

struct Registry
{
  std::vector<std::string> names;
  std::map<std::string, TaskSpec> tasks;
};

EvolutionConfig row(int n_agent, int n_tool, int n_action, int k_top, double reward_save, int n_iteration,
                    int k_sim)
{
  return EvolutionConfig{n_agent, n_tool, n_action, k_top, reward_save, n_iteration, k_sim};
}

const Registry & registry()
{
  static const Registry reg = [] {
    Registry r;
    auto put = [&r](const std::string & name, SceneBuilder builder, RewardFn reward, EvolutionConfig config,
                    bool gripper, std::string description) {
      TaskSpec t;
      t.name = name;
      t.scene_builder = std::move(builder);
      t.reward_fn = std::move(reward);
      t.config = config;
      t.gripper_allowed = gripper;
      t.description = std::move(description);
      r.names.push_back(name);
      r.tasks.emplace(name, std::move(t));
    };
    put("BringCube", bring_cube_scene, reward_bring_cube, row(20, 10, 10, 5, 0.6, 3, 100), false,
        "A red 4 cm cube rests on the table at (1.05, 0.00), beyond the arm's reach. Bring the cube as close "
        "as possible to the target zone centred at (0.45, 0.00).");
    put("CleanTable", clean_table_scene, reward_clean_table, row(20, 10, 10, 5, 0.6, 3, 100), false,
        "Five 3 cm cubes (dust_0 to dust_4) are scattered on the table between x = 0.42 and x = 0.52. Push all "
        "of them away from the robot into the circular goal zone of radius 0.12 m centred at (0.75, 0.00).");
    put("DislodgeCube", dislodge_cube_scene, reward_dislodge_cube, row(20, 10, 10, 5, 0.6, 3, 100), false,
        "A red 4 cm cube sits at (0.65, 0.00) in the corner of an L-shaped closed pipe with a 6 cm square "
        "bore. One opening faces the robot at x = 0.45 (along -x); the other opens at y = -0.25 (along -y). "
        "Get the cube out through either opening.");
    put("ElevatePlate", elevate_plate_scene, reward_elevate_plate, row(20, 10, 10, 5, 0.6, 3, 100), true,
        "A thin white plate (0.2 x 0.2 x 0.01 m) lies flat on the table centred at (0.55, 0.00). Lift it so "
        "that its underside is at least 0.25 m above the table.");
    put("GatherSpheres", gather_spheres_scene, reward_gather_spheres, row(20, 10, 10, 5, 0.6, 3, 100), true,
        "Nine purple spheres of radius 1.5 cm lie in a container centred at (0.55, 0.00) whose walls close "
        "the +x, +y and -y sides; the side facing the robot is open. Gather as many spheres as possible and "
        "raise them more than 0.3 m.");
    put("HighObject", high_object_scene, reward_high_object, row(20, 10, 10, 5, 0.5, 3, 100), true,
        "A green 4 cm cube sits on a shelf 0.4 m high at (0.72, 0.00). Move it into the open-top box centred "
        "at (0.45, 0.00) whose walls are 0.1 m tall.");
    put("LiftBox", lift_box_scene, reward_lift_box, row(30, 15, 15, 5, 0.1, 3, 100), true,
        "A brown box (0.2 x 0.15 x 0.12 m) rests on the table centred at (0.55, 0.00). Lift it until its "
        "bottom is above 0.25 m.");
    put("MoveBall", move_ball_scene, reward_move_ball, row(20, 10, 10, 5, 0.6, 3, 100), false,
        "A red ball of radius 3 cm rests on the robot's left at (0.50, 0.30). Move it to the target on the "
        "right at (0.50, -0.30) without letting it travel fast.");
    put("OneBook", one_book_scene, reward_one_book, row(20, 10, 10, 5, 0.4, 3, 100), true,
        "Five upright books (book_0 to book_4, 0.2 m deep, 3 cm thick, 0.24 m tall) stand side by side "
        "along y between two holders, centred at x = 0.60. Pull the middle book (book_2) out while every "
        "other book stays where it is.");
    put("ScoreGoal", score_goal_scene, reward_score_goal, row(20, 10, 10, 5, 0.4, 3, 100), false,
        "A puck lies on the ground at (0.90, 0.15), out of reach. A goal frame spans x = 1.15 to 1.35 and "
        "y = -0.15 to 0.15 and is open toward the robot. Get the puck entirely inside the goal.");
    put("SnatchCookie", snatch_cookie_scene, reward_snatch_cookie, row(5, 5, 5, 5, 0.3, 3, 100), true,
        "Three stacked cookies (4 cm wide, 1 cm thick) lie at the bottom of an open-top jar centred at "
        "(0.55, 0.00) with a 10 cm square opening and 0.15 m tall walls. Take at least one cookie out of "
        "the jar.");
    put("TurkeyLegs", turkey_legs_scene, reward_turkey_legs, row(30, 10, 15, 5, 0.2, 4, 100), true,
        "A pot with two side handles at (0.55, 0.00) holds three turkey legs. A chef's box sits on the "
        "robot's left at (0.55, 0.32). Move every leg into the chef's box without moving the pot.");
    return r;
  }();
  return reg;
}

}  // namespace

std::filesystem::path data_dir()
{
  if (const char * env = std::getenv("TOOLSMITH_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return TOOLSMITH_DATA_DIR;
}

void EvolutionConfig::validate() const
{
  auto positive = [](int v, const char * name) {
    if (v < 1) {
      throw ConfigError(std::string(name) + " must be a positive integer");
    }
  };
  positive(n_agent, "n_agent");
  positive(n_tool, "n_tool");
  positive(n_action, "n_action");
  positive(k_top, "k_top");
  positive(n_iteration, "n_iteration");
  positive(k_sim, "k_sim");
  if (!(reward_save >= 0.0 && reward_save <= 1.0)) {
    throw ConfigError("reward_save must lie in [0, 1]");
  }
  if (static_cast<std::size_t>(k_top) > max_population()) {
    throw ConfigError("k_top exceeds n_agent * n_tool * n_action");
  }
}

bool operator==(const EvolutionConfig & a, const EvolutionConfig & b)
{
  return a.n_agent == b.n_agent && a.n_tool == b.n_tool && a.n_action == b.n_action && a.k_top == b.k_top &&
         a.reward_save == b.reward_save && a.n_iteration == b.n_iteration && a.k_sim == b.k_sim;
}

nlohmann::json to_json(const EvolutionConfig & c)
{
  return {{"n_agent", c.n_agent}, {"n_tool", c.n_tool},           {"n_action", c.n_action},
          {"k_top", c.k_top},     {"reward_save", c.reward_save}, {"n_iteration", c.n_iteration},
          {"k_sim", c.k_sim}};
}

EvolutionConfig apply_overrides(const EvolutionConfig & base, const nlohmann::json & j)
{
  EvolutionConfig c = base;
  if (!j.is_object()) {
    throw ConfigError("evolution config must be a JSON object");
  }
  const std::map<std::string, int *> ints{
    {"n_agent", &c.n_agent}, {"n_tool", &c.n_tool},           {"n_action", &c.n_action},
    {"k_top", &c.k_top},     {"n_iteration", &c.n_iteration}, {"k_sim", &c.k_sim}};
  for (const auto & [key, value] : j.items()) {
    try {
      if (auto it = ints.find(key); it != ints.end()) {
        if (!value.is_number_integer()) {
          throw ConfigError(key + " must be an integer");
        }
        *it->second = value.get<int>();
      } else if (key == "reward_save") {
        c.reward_save = value.get<double>();
      } else {
        throw ConfigError("unknown evolution config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception & e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

namespace
{

std::map<std::string, double RewardConstants::*> constant_fields()
{
  return {
    {"high_object_w1", &RewardConstants::high_object_w1},
    {"high_object_w2", &RewardConstants::high_object_w2},
    {"move_ball_w1", &RewardConstants::move_ball_w1},
    {"move_ball_w2", &RewardConstants::move_ball_w2},
    {"move_ball_v_cap", &RewardConstants::move_ball_v_cap},
    {"one_book_w1", &RewardConstants::one_book_w1},
    {"one_book_delta_still", &RewardConstants::one_book_delta_still},
    {"turkey_legs_delta_pot", &RewardConstants::turkey_legs_delta_pot},
    {"gather_spheres_cap", &RewardConstants::gather_spheres_cap},
    {"lift_box_threshold", &RewardConstants::lift_box_threshold},
    {"elevate_plate_target", &RewardConstants::elevate_plate_target},
  };
}

}  // namespace

bool operator==(const RewardConstants & a, const RewardConstants & b)
{
  for (const auto & [key, field] : constant_fields()) {
    if (a.*field != b.*field) {
      return false;
    }
  }
  return true;
}

nlohmann::json to_json(const RewardConstants & c)
{
  nlohmann::json j = nlohmann::json::object();
  for (const auto & [key, field] : constant_fields()) {
    j[key] = c.*field;
  }
  return j;
}

RewardConstants apply_overrides(const RewardConstants & base, const nlohmann::json & j)
{
  if (!j.is_object()) {
    throw ConfigError("reward constants must be a JSON object");
  }
  RewardConstants c = base;
  const auto fields = constant_fields();
  for (const auto & [key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw ConfigError("unknown reward constant '" + key + "'");
    }
    if (!value.is_number()) {
      throw ConfigError(key + " must be a number");
    }
    c.*(it->second) = value.get<double>();
  }
  return c;
}

RewardConstants load_reward_constants(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open " + path.string());
  }
  try {
    return apply_overrides(RewardConstants{}, nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error & e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

double TaskSpec::reward(const SceneState & initial, const SceneState & final_state) const
{
  return clamp01(reward_fn(initial, final_state, constants));
}

const std::vector<std::string> & task_names() { return registry().names; }

const TaskSpec & get_task(const std::string & name)
{
  const auto & tasks = registry().tasks;
  auto it = tasks.find(name);
  if (it == tasks.end()) {
    throw NotFound("unknown task '" + name + "'");
  }
  return it->second;
}

EvolutionConfig default_config(const std::string & task) { return get_task(task).config; }

SceneState build_scene(const TaskSpec & task, std::uint64_t seed) { return task.scene_builder(seed); }

RewardFn reward_by_name(const std::string & name) { return get_task(name).reward_fn; }

TaskSpec custom_task(
  const std::string & name, const std::filesystem::path & scene_file, const std::string & reward_name,
  const EvolutionConfig & config)
{
  const SceneState scene = load_scene(scene_file);
  const TaskSpec & base = get_task(reward_name);
  TaskSpec t = base;
  t.name = name;
  t.scene_builder = [scene](std::uint64_t) { return scene; };
  t.config = config;
  return t;
}

double reward_bring_cube(const SceneState & initial, const SceneState & final_state, const RewardConstants &)
{
  const Vec3 target = pos(initial, "target");
  return distance_progress(planar(pos(initial, "cube"), target), planar(pos(final_state, "cube"), target));
}

double reward_clean_table(const SceneState & initial, const SceneState & final_state, const RewardConstants &)
{
  const SceneObject & goal = initial.at("goal_zone");
  const Vec3 c = goal.pose.position;
  const double r = radius_of(goal);
  const auto cubes = ids_with_prefix(initial, "dust_");
  if (cubes.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (const auto & id : cubes) {
    const double d_i = std::max(0.0, planar(pos(initial, id), c) - r);
    const double d_f = std::max(0.0, planar(pos(final_state, id), c) - r);
    sum += distance_progress(d_i, d_f);
  }
  return sum / static_cast<double>(cubes.size());
}

double reward_dislodge_cube(const SceneState & initial, const SceneState & final_state, const RewardConstants &)
{
  const Vec3 ex = pos(initial, "exit_neg_x");
  const Vec3 ey = pos(initial, "exit_neg_y");
  // Once the cube is past an exit plane its distance to that exit is zero.
  auto to_x = [&](const Vec3 & p) { return p.x() <= ex.x() ? 0.0 : planar(p, ex); };
  auto to_y = [&](const Vec3 & p) { return p.y() <= ey.y() ? 0.0 : planar(p, ey); };
  const Vec3 a = pos(initial, "cube");
  const Vec3 b = pos(final_state, "cube");
  return std::max(distance_progress(to_x(a), to_x(b)), distance_progress(to_y(a), to_y(b)));
}

double reward_elevate_plate(const SceneState & initial, const SceneState & final_state, const RewardConstants & k)
{
  const double z_i = initial.at("plate").bounds().min.z();
  const double z_f = final_state.at("plate").bounds().min.z();
  if (k.elevate_plate_target <= z_i) {
    return z_f >= k.elevate_plate_target ? 1.0 : 0.0;
  }
  return clamp01((z_f - z_i) / (k.elevate_plate_target - z_i));
}

double reward_gather_spheres(const SceneState & initial, const SceneState & final_state, const RewardConstants & k)
{
  const auto spheres = ids_with_prefix(initial, "sphere_");
  if (spheres.empty() || k.gather_spheres_cap <= 0.0) {
    return 0.0;
  }
  double sum = 0.0;
  for (const auto & id : spheres) {
    const double gain = std::max(0.0, pos(final_state, id).z() - pos(initial, id).z());
    sum += std::min(gain, k.gather_spheres_cap) / k.gather_spheres_cap;
  }
  return sum / static_cast<double>(spheres.size());
}

double reward_high_object(const SceneState & initial, const SceneState & final_state, const RewardConstants & k)
{
  const Aabb interior = initial.at("box_interior").bounds();
  const Vec3 a = pos(initial, "cube");
  const Vec3 b = pos(final_state, "cube");
  if (interior.contains(b)) {
    return 1.0;
  }
  const Vec3 goal = interior.center();
  const double near = distance_progress((a - goal).norm(), (b - goal).norm());
  const double fall = a.z() - interior.min.z();
  const double drop = fall > 0.0 ? clamp01((a.z() - b.z()) / fall) : 0.0;
  return clamp01(k.high_object_w1 * near + k.high_object_w2 * drop);
}

double reward_lift_box(const SceneState & initial, const SceneState & final_state, const RewardConstants & k)
{
  const double z_i = initial.at("box").bounds().min.z();
  const double z_f = final_state.at("box").bounds().min.z();
  if (k.lift_box_threshold <= z_i) {
    return z_f >= k.lift_box_threshold ? 1.0 : 0.0;
  }
  return clamp01((z_f - z_i) / (k.lift_box_threshold - z_i));
}

double reward_move_ball(const SceneState & initial, const SceneState & final_state, const RewardConstants & k)
{
  const Vec3 target = pos(initial, "target");
  const double progress =
    distance_progress(planar(pos(initial, "ball"), target), planar(pos(final_state, "ball"), target));
  const double calm =
    k.move_ball_v_cap > 0.0 ? 1.0 - clamp01(final_state.at("ball").held_speed / k.move_ball_v_cap) : 0.0;
  // The speed term only counts in proportion to how far the ball got.
  return clamp01(k.move_ball_w1 * progress + k.move_ball_w2 * progress * calm);
}

double reward_one_book(const SceneState & initial, const SceneState & final_state, const RewardConstants & k)
{
  const std::string middle = "book_2";
  const double depth = initial.at(middle).bounds().size().x();
  const double moved = planar(pos(initial, middle), pos(final_state, middle));
  const double progress = depth > 0.0 ? clamp01(moved / depth) : 0.0;
  double still = 1.0;
  for (const auto & id : ids_with_prefix(initial, "book_")) {
    if (id != middle && (pos(final_state, id) - pos(initial, id)).norm() >= k.one_book_delta_still) {
      still = 0.0;
    }
  }
  return clamp01(k.one_book_w1 * progress * still);
}

double reward_score_goal(const SceneState & initial, const SceneState & final_state, const RewardConstants &)
{
  const Aabb goal = initial.at("goal_volume").bounds();
  if (goal.contains(final_state.at("puck").bounds())) {
    return 1.0;
  }
  const Vec3 c = goal.center();
  const double d_i = planar(pos(initial, "puck"), c);
  const double d_f = planar(pos(final_state, "puck"), c);
  return d_i > 0.0 ? clamp01((d_i - d_f) / d_i) : 0.0;
}

double reward_snatch_cookie(const SceneState & initial, const SceneState & final_state, const RewardConstants &)
{
  const Aabb jar = initial.at("jar_interior").bounds();
  const double rim = jar.max.z();
  double top_i = -std::numeric_limits<double>::infinity();
  double top_f = -std::numeric_limits<double>::infinity();
  for (const auto & id : ids_with_prefix(initial, "cookie_")) {
    const SceneObject & c = final_state.at(id);
    const double bottom = c.bounds().min.z();
    if (!footprint_inside(jar, c.pose.position) || bottom >= rim) {
      return 1.0;
    }
    top_i = std::max(top_i, initial.at(id).bounds().min.z());
    top_f = std::max(top_f, bottom);
  }
  if (!std::isfinite(top_i) || rim <= top_i) {
    return 0.0;
  }
  return clamp01((top_f - top_i) / (rim - top_i));
}

double reward_turkey_legs(const SceneState & initial, const SceneState & final_state, const RewardConstants & k)
{
  const Aabb target = initial.at("chef_box_interior").bounds();
  const auto legs = ids_with_prefix(initial, "leg_");
  if (legs.empty()) {
    return 0.0;
  }
  const Vec3 pot_i = pos(initial, "pot");
  const Vec3 pot_f = pos(final_state, "pot");
  const bool pot_ok = !target.contains(final_state.at("pot").bounds().center()) &&
                      (pot_f - pot_i).norm() < k.turkey_legs_delta_pot;
  if (!pot_ok) {
    return 0.0;
  }
  std::size_t inside = 0;
  for (const auto & id : legs) {
    inside += target.contains(pos(final_state, id)) ? 1 : 0;
  }
  return static_cast<double>(inside) / static_cast<double>(legs.size());
}

}  // namespace toolsmith
