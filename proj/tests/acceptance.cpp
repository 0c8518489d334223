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

// Acceptance report: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "toolsmith/evolution.hpp"
#include "toolsmith/http_generator.hpp"
#include "toolsmith/mock_generator.hpp"
#include "toolsmith/run_archive.hpp"

#include "stub_server.hpp"

using namespace toolsmith;

namespace
{

struct Outcome
{
  bool pass = true;
  std::string note;
};

// Collects the first failure message; later checks still run.
struct Checker
{
  Outcome out;
  void operator()(bool ok, const std::string & what)
  {
    if (!ok && out.pass) {
      out.pass = false;
      out.note = what;
    }
  }
};

int failures = 0;

void criterion(int n, const char * name, double budget_s, const std::function<Outcome()> & body)
{
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception & e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && s > budget_s && o.pass) {
    o = {false, "took longer than " + std::to_string(budget_s) + " s"};
  }
  std::printf("[%s] %d %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", n, name, s, o.note.empty() ? "" : ": ",
              o.note.c_str());
  std::fflush(stdout);
  failures += o.pass ? 0 : 1;
}

void shift_prefix(SceneState & s, const std::string & prefix, const Vec3 & d)
{
  for (auto & [id, o] : s.objects) {
    if (id.rfind(prefix, 0) == 0) {
      o.pose.position += d;
    }
  }
}

void place_prefix(SceneState & s, const std::string & prefix, const Vec3 & p)
{
  for (auto & [id, o] : s.objects) {
    if (id.rfind(prefix, 0) == 0) {
      o.pose.position = p;
    }
  }
}

void solve(const std::string & task, SceneState & s)
{
  if (task == "BringCube") {
    place_prefix(s, "cube", s.at("target").pose.position + Vec3(0, 0, 0.02));
  } else if (task == "CleanTable") {
    place_prefix(s, "dust_", s.at("goal_zone").pose.position);
  } else if (task == "DislodgeCube") {
    place_prefix(s, "cube", Vec3(0.40, 0.0, 0.02));
  } else if (task == "ElevatePlate") {
    shift_prefix(s, "plate", Vec3(0, 0, 0.3));
  } else if (task == "GatherSpheres") {
    shift_prefix(s, "sphere_", Vec3(0, 0, 0.35));
  } else if (task == "HighObject") {
    place_prefix(s, "cube", s.at("box_interior").pose.position);
  } else if (task == "LiftBox") {
    shift_prefix(s, "box", Vec3(0, 0, 0.25));
  } else if (task == "MoveBall") {
    place_prefix(s, "ball", s.at("target").pose.position + Vec3(0, 0, 0.03));
  } else if (task == "OneBook") {
    shift_prefix(s, "book_2", Vec3(-0.25, 0, 0));
  } else if (task == "ScoreGoal") {
    place_prefix(s, "puck", s.at("goal_volume").pose.position);
  } else if (task == "SnatchCookie") {
    shift_prefix(s, "cookie_2", Vec3(0, 0, 0.3));
  } else if (task == "TurkeyLegs") {
    place_prefix(s, "leg_", s.at("chef_box_interior").pose.position);
  }
}

Outcome config_fidelity()
{
  const std::map<std::string, EvolutionConfig> table{
    {"BringCube", {20, 10, 10, 5, 0.6, 3, 100}},    {"CleanTable", {20, 10, 10, 5, 0.6, 3, 100}},
    {"DislodgeCube", {20, 10, 10, 5, 0.6, 3, 100}}, {"ElevatePlate", {20, 10, 10, 5, 0.6, 3, 100}},
    {"GatherSpheres", {20, 10, 10, 5, 0.6, 3, 100}}, {"HighObject", {20, 10, 10, 5, 0.5, 3, 100}},
    {"LiftBox", {30, 15, 15, 5, 0.1, 3, 100}},      {"MoveBall", {20, 10, 10, 5, 0.6, 3, 100}},
    {"OneBook", {20, 10, 10, 5, 0.4, 3, 100}},      {"ScoreGoal", {20, 10, 10, 5, 0.4, 3, 100}},
    {"SnatchCookie", {5, 5, 5, 5, 0.3, 3, 100}},    {"TurkeyLegs", {30, 10, 15, 5, 0.2, 4, 100}},
  };
  Checker check;
  check(task_names().size() == table.size(), "task count");
  for (const auto & [name, row] : table) {
    check(default_config(name) == row, name + " row differs");
  }
  return check.out;
}

Outcome reward_properties()
{
  Checker check;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 0.15);
  std::uniform_real_distribution<double> speed(0.0, 2.0);
  for (const auto & name : task_names()) {
    const TaskSpec & t = get_task(name);
    const SceneState base = build_scene(t, 0);
    check(t.reward_fn(base, base, t.constants) == 0.0, name + " no-op is not 0");
    SceneState goal = base;
    solve(name, goal);
    check(std::abs(t.reward_fn(base, goal, t.constants) - 1.0) < 1e-12, name + " goal does not saturate");
    std::vector<std::string> movable;
    for (const auto & [id, o] : base.objects) {
      if (o.movable) {
        movable.push_back(id);
      }
    }
    SceneState b = base;
    for (int i = 0; i < 100000; ++i) {
      const SceneState & from = i % 2 == 0 ? base : goal;
      for (const auto & id : movable) {
        SceneObject & o = b.objects.at(id);
        o.pose.position = from.at(id).pose.position + Vec3(n(rng), n(rng), n(rng));
        o.held_speed = speed(rng);
      }
      const double r = t.reward_fn(base, b, t.constants);
      if (!(r >= 0.0 && r <= 1.0)) {
        check(false, name + " reward " + std::to_string(r) + " out of range");
        break;
      }
    }
  }
  // Stated monotone terms: closer cube, higher box.
  const TaskSpec & bring = get_task("BringCube");
  const SceneState s = build_scene(bring, 0);
  const Vec3 a = s.at("cube").pose.position;
  const Vec3 g = s.at("target").pose.position + Vec3(0, 0, 0.02);
  double last = -1.0;
  for (int i = 0; i <= 100; ++i) {
    SceneState f = s;
    f.objects.at("cube").pose.position = a + (g - a) * (i / 100.0);
    const double r = bring.reward(s, f);
    check(r >= last, "BringCube not monotone");
    last = r;
  }
  const TaskSpec & lift = get_task("LiftBox");
  const SceneState l = build_scene(lift, 0);
  last = -1.0;
  for (int i = 0; i <= 40; ++i) {
    SceneState f = l;
    shift_prefix(f, "box", Vec3(0, 0, 0.01 * i));
    const double r = lift.reward(l, f);
    check(r >= last, "LiftBox not monotone");
    last = r;
  }
  return check.out;
}

Outcome selection_oracle()
{
  Checker check;
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> size(0, 30);
  std::uniform_int_distribution<int> level(0, 10);
  std::uniform_int_distribution<int> dist(0, 3);
  std::uniform_int_distribution<int> k(1, 10);
  int ties = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<DesignCandidate> cs;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) {
      DesignCandidate c;
      c.id = std::to_string(i);
      c.fitness = FitnessRecord{level(rng) / 10.0, dist(rng) * 0.4, {}, 0, std::nullopt};
      cs.push_back(c);
    }
    const int k_top = k(rng);
    const double save = level(rng) / 10.0;
    std::vector<std::size_t> order(cs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      const auto & fx = *cs[x].fitness;
      const auto & fy = *cs[y].fitness;
      if (fx.reward != fy.reward) {
        return fx.reward > fy.reward;
      }
      return fx.distance < fy.distance;
    });
    std::vector<std::string> want;
    for (std::size_t i = 0; i < order.size() && static_cast<int>(i) < k_top; ++i) {
      if (cs[order[i]].fitness->reward > save) {
        want.push_back(cs[order[i]].id);
      }
      if (i > 0 && cs[order[i]].fitness->reward == cs[order[i - 1]].fitness->reward) {
        ++ties;
      }
    }
    std::vector<std::string> got;
    for (const auto & e : select_elites(cs, k_top, save)) {
      got.push_back(e.id);
    }
    check(got == want, "mismatch on trial " + std::to_string(trial));
  }
  check(ties > 1000, "too few ties exercised");
  return check.out;
}

Outcome trajectory_math()
{
  Checker check;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const Quat a = Quat(n(rng), n(rng), n(rng), n(rng)).normalized();
    const Quat b = Quat(n(rng), n(rng), n(rng), n(rng)).normalized();
    check(slerp(a, b, 0.0).coeffs() == a.coeffs(), "slerp(t=0) differs from start");
    const Quat end = slerp(a, b, 1.0);
    check(end.coeffs() == b.coeffs(), "slerp(t=1) differs from end");
    const double t = u(rng);
    const Quat m = slerp(a, b, t);
    check(std::abs(m.norm() - 1.0) < 1e-9, "slerp not unit norm");
    // Short arc: -b names the same rotation and must give the same path,
    // and the interpolant stays at least as close to a as b is.
    Quat nb = b;
    nb.coeffs() *= -1.0;
    check((slerp(a, nb, t).toRotationMatrix() - m.toRotationMatrix()).cwiseAbs().maxCoeff() < 1e-9,
          "slerp takes the long arc");
    check(std::abs(a.dot(m)) >= std::abs(a.dot(b)) - 1e-9, "slerp leaves the arc");
  }
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::vector<double>> rows;
    const int k = 2 + static_cast<int>(u(rng) * 5);
    for (int w = 0; w < k; ++w) {
      rows.push_back({u(rng) - 0.5, u(rng) - 0.5, u(rng), 0, 0, 0});
    }
    const ActionPlan p = ActionPlan::from_rows(rows);
    double exact = 0.0;
    for (std::size_t w = 1; w < rows.size(); ++w) {
      exact += std::hypot(rows[w][0] - rows[w - 1][0], rows[w][1] - rows[w - 1][1], rows[w][2] - rows[w - 1][2]);
    }
    check(std::abs(path_length(densify(p)) - exact) < 1e-9, "path length differs from polyline length");
    check(std::abs(path_length(densify(p, 0.001)) - exact) < 1e-9, "path length depends on subdivision");
  }
  for (int i = 0; i < 10000; ++i) {
    const Vec3 rpy((u(rng) * 2 - 1) * M_PI, (u(rng) * 2 - 1) * (M_PI / 2 - 0.01), (u(rng) * 2 - 1) * M_PI);
    const Vec3 back = quaternion_to_euler(euler_to_quaternion(rpy));
    for (int k = 0; k < 3; ++k) {
      check(std::abs(wrap_angle(back[k] - rpy[k])) < 1e-9, "euler round trip");
    }
  }
  return check.out;
}

std::string box_link(const std::string & name, const std::string & extra)
{
  return "<link name=\"" + name + "\">" + extra + "</link>";
}

Violation violation_of(const std::string & text)
{
  try {
    parse_tool_fragment(text);
  } catch (const ValidationError & e) {
    return e.kind();
  }
  return Violation::Structure;
}

Outcome urdf_round_trip()
{
  Checker check;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const ToolDesign t = random_tool(rng, i % 2 == 1);
    const ToolDesign back = parse_tool_fragment(serialize_tool_fragment(t));
    check(approx_equal(back, t, 0.0), "round trip changed tool " + std::to_string(i));
  }
  const std::string box = "<visual><geometry><box size=\"0.1 0.1 0.1\"/></geometry></visual>";
  const std::string light = "<inertial><mass value=\"0.005\"/></inertial>";
  const std::string fix = "<joint name=\"j\" type=\"fixed\"><parent link=\"panda_virtual\"/><child link=\"a\"/></joint>";
  check(violation_of(box_link("a", box + "<inertial><mass value=\"0.5\"/></inertial>") + fix) == Violation::Mass,
        "mass violation");
  check(violation_of(box_link("a", box + light) + fix + box_link("b", box + light) +
                     "<joint name=\"k\" type=\"fixed\"><parent link=\"a\"/><child link=\"b\"/>"
                     "<origin xyz=\"0.3 0 0\" rpy=\"0 0 0\"/></joint>") == Violation::Gap,
        "gap violation");
  check(violation_of(box_link("a", "<visual><geometry><cylinder radius=\"0.1\" length=\"0.1\"/></geometry></visual>" +
                                     light) +
                     fix) == Violation::NonBox,
        "non-box violation");
  check(violation_of(box_link("a", box + light) +
                     "<joint name=\"j\" type=\"fixed\"><parent link=\"panda_link7\"/><child link=\"a\"/></joint>") ==
          Violation::BadAttachment,
        "attachment violation");
  return check.out;
}

Outcome sim_determinism()
{
  Checker check;
  ToolDesign t;
  t.links.push_back(BoxLink{"pad", Vec3(0.01, 0.05, 0.03), 0.005, Origin{}, {}});
  t.joints.push_back(FixedJoint{"pad_joint", kVirtualFlange, "pad", Origin{}});
  const RobotDescription robot = merge(blank_robot(false), t);
  const BuiltinBackend backend;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double half = 0.01 + 0.03 * u(rng);
    const double x0 = 0.35 + 0.2 * u(rng);
    const double end = x0 + 0.05 + 0.2 * u(rng);
    SceneState s;
    SceneObject o;
    o.id = "obj";
    o.shape = BoxShape{Vec3::Constant(half)};
    o.pose = Pose::translation(Vec3(x0, -0.03 + 0.06 * u(rng), half));
    o.movable = true;
    s.objects[o.id] = o;
    const DenseTrajectory traj = densify(ActionPlan::from_rows({{0.2, 0, 0.035, 0, 0, 0}, {end, 0, 0.035, 0, 0, 0}}));
    const RolloutResult a = backend.rollout(s, robot, traj);
    const RolloutResult b = backend.rollout(s, robot, traj);
    check(identical(a, b), "rollouts differ on trial " + std::to_string(i));
    const Aabb box = a.final_state.at("obj").bounds();
    check(box.min.x() >= end + 0.01 - 1e-6, "object tunnelled on trial " + std::to_string(i));
    check(a.final_state.at("obj").pose.position.x() > x0, "object not displaced on trial " + std::to_string(i));
  }
  return check.out;
}

EvolutionConfig scaled(int n_iteration)
{
  EvolutionConfig c = default_config("BringCube");
  c.n_agent = 4;
  c.n_tool = 3;
  c.n_action = 3;
  c.n_iteration = n_iteration;
  return c;
}

RunArchive planted_run(int n_iteration)
{
  MockOptions o;
  o.planted = true;
  static const MockGenerator gen(0, o);
  DesignClient client;
  client.generator = &gen;
  return run(get_task("BringCube"), scaled(n_iteration), client, BuiltinBackend());
}

std::string series(const std::vector<double> & v)
{
  std::ostringstream ss;
  for (double x : v) {
    ss << (ss.tellp() > 0 ? " " : "") << x;
  }
  return ss.str();
}

Outcome end_to_end()
{
  Checker check;
  const RunArchive a = planted_run(3);
  const RunArchive b = planted_run(3);
  check(a.best_so_far.size() == 3, "expected three iterations");
  check(std::is_sorted(a.best_so_far.begin(), a.best_so_far.end()), "best-so-far not monotone");
  check(a.best_so_far.size() >= 2 && a.best_so_far[1] >= 0.9, "best by iteration 2 below 0.9");
  check(archive_digest(a) == archive_digest(b), "archive digests differ");
  Outcome out = check.out;
  if (out.pass) {
    out.note = "best-so-far " + series(a.best_so_far);
  }
  return out;
}

Outcome ablation()
{
  const RunArchive one = planted_run(1);
  const RunArchive three = planted_run(3);
  Outcome out;
  out.pass = one.best_so_far.back() <= three.best_so_far.back();
  std::ostringstream ss;
  ss << "1 iteration " << one.best_so_far.back() << ", 3 iterations " << three.best_so_far.back();
  out.note = ss.str();
  return out;
}

Outcome endpoint_smoke()
{
  const TaskSpec & t = get_task("BringCube");
  EvolutionConfig c = scaled(1);
  c.n_agent = 2;
  c.n_tool = 1;
  c.n_action = 1;
  const PromptBundle bundle = compose_prompt(Mission::InitialSampling, t, c);
  HttpConfig cfg = http_config_from_env();
  std::unique_ptr<testing::StubServer> stub;
  std::string where;
  if (const char * live = std::getenv("TOOLSMITH_LIVE_ENDPOINT"); live != nullptr && *live != '\0') {
    cfg.url = live;
    where = "live endpoint";
  } else {
    stub = std::make_unique<testing::StubServer>(
      [&bundle](const nlohmann::json &) { return mock_generate(0, bundle, 0); });
    cfg.url = stub->url();
    cfg.model = "stub";
    where = "local stub";
  }
  cfg.timeout_s = std::min(cfg.timeout_s, 120.0);
  try {
    const auto responses = fan_out(HttpGenerator(cfg), bundle, c.n_agent);
    std::size_t n = 0;
    for (const auto & r : responses) {
      n += r.candidate_count();
    }
    return {n >= 1, where + ": " + std::to_string(n) + " parseable candidates"};
  } catch (const AllAgentsFailed & e) {
    return {true, where + ": clean AllAgentsFailed (" + std::to_string(e.errors().size()) + " agents)"};
  }
}

}  // namespace

int main()
{
  criterion(1, "config fidelity", 1.0, config_fidelity);
  criterion(2, "reward properties", 30.0, reward_properties);
  criterion(3, "selection oracle", 5.0, selection_oracle);
  criterion(4, "trajectory math", 0.0, trajectory_math);
  criterion(5, "URDF round trip and validator", 0.0, urdf_round_trip);
  criterion(6, "simulator determinism and no tunnelling", 0.0, sim_determinism);
  criterion(7, "end-to-end planted mock loop", 60.0, end_to_end);
  criterion(8, "ablation semantics", 0.0, ablation);
  criterion(9, "endpoint smoke", 0.0, endpoint_smoke);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
