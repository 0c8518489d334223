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

// Command-line front end: run, report, replay, prompt, scene, list-tasks.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "toolsmith/designer_client.hpp"
#include "toolsmith/evolution.hpp"
#include "toolsmith/http_generator.hpp"
#include "toolsmith/mock_generator.hpp"
#include "toolsmith/render.hpp"
#include "toolsmith/run_archive.hpp"
#include "toolsmith/scene_io.hpp"
#include "toolsmith/tasks.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace toolsmith;

namespace
{

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + p.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path & p, const std::string & text)
{
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + p.string());
  }
  out << text;
}

// Settings from --config plus command-line overrides.
struct Settings
{
  std::string task = "BringCube";
  std::string scene_file;
  std::string reward_name;
  std::string generator = "mock";
  std::string backend = "builtin";
  std::string mission = "initial_sampling";
  std::string config_file;
  std::string human_prompt;
  std::string fixed_tool_file;
  std::string env_code_file;
  std::uint64_t seed = 0;
  bool planted = false;
  bool image = false;
  double gripper_share = 0.5;
  std::vector<std::uint64_t> scene_seeds{0};
  json config_overrides = json::object();
  json constant_overrides = json::object();
  HttpConfig http;
  unsigned threads = 0;

  // Command-line overrides for single fields.
  std::optional<int> n_agent, n_tool, n_action, k_top, n_iteration, k_sim;
  std::optional<double> reward_save;
};

void load_config_file(Settings & s)
{
  if (s.config_file.empty()) {
    return;
  }
  const json j = json::parse(slurp(s.config_file));
  if (!j.is_object()) {
    throw ConfigError("config file must hold a JSON object");
  }
  for (const auto & [key, value] : j.items()) {
    if (key == "config") {
      s.config_overrides = value;
    } else if (key == "reward_constants") {
      s.constant_overrides = value;
    } else if (key == "http") {
      s.http = http_config_from_json(value, s.http);
    } else if (key == "scene_seeds") {
      s.scene_seeds = value.get<std::vector<std::uint64_t>>();
    } else if (key == "gripper_share") {
      s.gripper_share = value.get<double>();
    } else {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }
}

TaskSpec resolve_task(const Settings & s)
{
  TaskSpec task = s.scene_file.empty()
                    ? get_task(s.task)
                    : custom_task(s.task, s.scene_file, s.reward_name.empty() ? s.task : s.reward_name,
                                  default_config(s.reward_name.empty() ? s.task : s.reward_name));
  EvolutionConfig c = apply_overrides(task.config, s.config_overrides);
  auto set = [](auto & field, const auto & v) {
    if (v) {
      field = *v;
    }
  };
  set(c.n_agent, s.n_agent);
  set(c.n_tool, s.n_tool);
  set(c.n_action, s.n_action);
  set(c.k_top, s.k_top);
  set(c.reward_save, s.reward_save);
  set(c.n_iteration, s.n_iteration);
  set(c.k_sim, s.k_sim);
  c.validate();
  task.config = c;
  task.constants = apply_overrides(load_reward_constants(data_dir() / "reward_constants.json"), s.constant_overrides);
  return task;
}

std::unique_ptr<GeneratorBackend> make_generator(const Settings & s)
{
  if (s.generator == "mock") {
    MockOptions o;
    o.planted = s.planted;
    return std::make_unique<MockGenerator>(s.seed, o);
  }
  if (s.generator == "http") {
    HttpConfig c = http_config_from_env(s.http);
    if (c.url.empty()) {
      throw ConfigError("http generator needs an endpoint (config http.url or TOOLSMITH_ENDPOINT)");
    }
    return std::make_unique<HttpGenerator>(c);
  }
  throw ConfigError("unknown generator '" + s.generator + "'");
}

std::unique_ptr<SimulatorBackend> make_backend(const std::string & name)
{
  if (name == "builtin") {
    return std::make_unique<BuiltinBackend>();
  }
  throw ConfigError("unknown simulator backend '" + name + "'");
}

PromptOptions prompt_options(const Settings & s, const TaskSpec & task)
{
  PromptOptions o;
  o.human_prompt = s.human_prompt;
  if (!s.fixed_tool_file.empty()) {
    o.fixed_tool = slurp(s.fixed_tool_file);
  }
  if (!s.env_code_file.empty()) {
    o.env_code = slurp(s.env_code_file);
  }
  if (s.image) {
    o.image = encode_png(render_top_view(build_scene(task, s.scene_seeds.front())));
  }
  return o;
}

void add_run_options(CLI::App * cmd, Settings & s)
{
  cmd->add_option("--task", s.task, "Task name (or a label for --scene-file)");
  cmd->add_option("--scene-file", s.scene_file, "Scene JSON to use instead of a built-in scene");
  cmd->add_option("--reward", s.reward_name, "Task whose reward scores --scene-file");
  cmd->add_option("--config", s.config_file, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--mission", s.mission, "initial_sampling, no_tool, human_spec or fixed_tool");
  cmd->add_option("--human-prompt", s.human_prompt, "Designer hint for human_spec");
  cmd->add_option("--fixed-tool", s.fixed_tool_file, "Tool fragment for fixed_tool")->check(CLI::ExistingFile);
  cmd->add_option("--env-code", s.env_code_file, "Environment source passed to the designer")
    ->check(CLI::ExistingFile);
  cmd->add_flag("--image", s.image, "Attach a top-view render to prompts");
  cmd->add_option("--n-agent", s.n_agent);
  cmd->add_option("--n-tool", s.n_tool);
  cmd->add_option("--n-action", s.n_action);
  cmd->add_option("--k-top", s.k_top);
  cmd->add_option("--reward-save", s.reward_save);
  cmd->add_option("--n-iteration", s.n_iteration);
  cmd->add_option("--k-sim", s.k_sim);
}

int cmd_list_tasks()
{
  std::printf("%-14s %-8s %7s %6s %8s %5s %11s %11s %5s\n", "task", "gripper", "n_agent", "n_tool", "n_action",
              "k_top", "reward_save", "n_iteration", "k_sim");
  for (const auto & name : task_names()) {
    const TaskSpec & t = get_task(name);
    const EvolutionConfig & c = t.config;
    std::printf("%-14s %-8s %7d %6d %8d %5d %11.2f %11d %5d\n", name.c_str(), t.gripper_allowed ? "yes" : "no",
                c.n_agent, c.n_tool, c.n_action, c.k_top, c.reward_save, c.n_iteration, c.k_sim);
  }
  return 0;
}

int cmd_run(Settings & s, const std::string & out_dir)
{
  load_config_file(s);
  const TaskSpec task = resolve_task(s);
  const auto generator = make_generator(s);
  const auto backend = make_backend(s.backend);
  DesignClient client;
  client.generator = generator.get();
  client.initial_mission = mission_from_string(s.mission);
  client.gripper_share = s.gripper_share;
  client.options = prompt_options(s, task);

  RunOptions opts;
  opts.seed = s.seed;
  opts.evaluation.scene_seeds = s.scene_seeds;
  opts.evaluation.threads = s.threads;
  opts.on_iteration = [](const IterationRecord & it, double best) {
    std::fprintf(stderr, "iteration %d (%s%s): %zu candidates, %zu elites, best %.4f%s%s\n", it.iteration,
                 to_string(it.mission), it.restart ? ", restart" : "", it.candidates.size(), it.elite_ids.size(), best,
                 it.error ? ", error: " : "", it.error ? it.error->c_str() : "");
  };
  const RunArchive archive = run(task, task.config, client, *backend, opts);
  save_run(archive, out_dir);
  std::printf("best %s reward %.6f distance %.6f\n", archive.best->id.c_str(), archive.best->fitness->reward,
              archive.best->fitness->distance);
  std::printf("digest %s\n", archive_digest(archive).c_str());
  return 0;
}

int cmd_report(const std::string & run_dir, std::string out_dir)
{
  const RunArchive a = load_run(run_dir);
  if (out_dir.empty()) {
    out_dir = (fs::path(run_dir) / "report").string();
  }
  fs::create_directories(out_dir);
  const DesignCandidate & best = *a.best;
  const bool gripper = best.tool.uses_gripper() || best.plan.uses_gripper();
  spit(fs::path(out_dir) / "merged.urdf", serialize_robot(merge(blank_robot(gripper), best.tool)));
  spit(fs::path(out_dir) / "plan.json", best.plan.to_json().dump(2) + "\n");

  std::ostringstream csv;
  csv << std::setprecision(17) << "iteration,id,agent,tool,plan,reward,distance,elite\n";
  for (const auto & it : a.iterations) {
    for (const auto & c : it.candidates) {
      const bool elite = std::find(it.elite_ids.begin(), it.elite_ids.end(), c.id) != it.elite_ids.end();
      csv << it.iteration << ',' << c.id << ',' << c.lineage.agent_id << ',' << c.lineage.tool_index << ','
          << c.lineage.plan_index << ',' << c.fitness->reward << ',' << c.fitness->distance << ',' << (elite ? 1 : 0)
          << '\n';
    }
  }
  spit(fs::path(out_dir) / "rewards.csv", csv.str());

  json curve = json::array();
  for (std::size_t i = 0; i < a.best_so_far.size(); ++i) {
    double iter_best = 0.0;
    for (const auto & c : a.iterations[i].candidates) {
      iter_best = std::max(iter_best, c.fitness->reward);
    }
    curve.push_back({{"iteration", i}, {"best_so_far", a.best_so_far[i]}, {"iteration_best", iter_best},
                     {"candidates", a.iterations[i].candidates.size()}});
  }
  spit(fs::path(out_dir) / "best_so_far.json",
       json{{"task", a.task}, {"best", best.id}, {"reward", best.fitness->reward},
            {"distance", best.fitness->distance}, {"series", curve}}
           .dump(2) +
         "\n");
  std::printf("best %s reward %.6f distance %.6f\nreport written to %s\n", best.id.c_str(), best.fitness->reward,
              best.fitness->distance, out_dir.c_str());
  return 0;
}

int cmd_replay(const std::string & run_dir, std::string id, const std::string & log_file, const std::string & scene_file)
{
  const RunArchive a = load_run(run_dir);
  if (id.empty()) {
    id = a.best->id;
  }
  const DesignCandidate * c = a.find(id);
  if (c == nullptr) {
    throw NotFound("no candidate '" + id + "' in " + run_dir);
  }
  TaskSpec task = scene_file.empty() ? get_task(a.task) : custom_task(a.task, scene_file, a.task, a.config);
  task.constants = a.constants;
  SimParams params;
  params.record_log = !log_file.empty();
  const BuiltinBackend backend(params);
  const std::uint64_t seed = c->fitness ? c->fitness->rollout_seed : 0;
  const FitnessRecord f = evaluate_candidate(*c, task, backend, {build_scene(task, seed)}, {seed});
  if (!log_file.empty()) {
    const bool gripper = c->tool.uses_gripper() || c->plan.uses_gripper();
    const RolloutResult r =
      backend.rollout(build_scene(task, seed), merge(blank_robot(gripper), c->tool), densify(c->plan));
    std::ofstream out(log_file);
    write_state_log(out, *r.state_log);
  }
  const bool same = c->fitness && c->fitness->reward == f.reward && c->fitness->distance == f.distance &&
                    c->fitness->diagnostics == f.diagnostics;
  std::printf("%s archived reward %.17g distance %.17g\n", id.c_str(), c->fitness ? c->fitness->reward : 0.0,
              c->fitness ? c->fitness->distance : 0.0);
  std::printf("%s replayed reward %.17g distance %.17g\n", id.c_str(), f.reward, f.distance);
  std::printf("%s\n", same ? "reproduced" : "MISMATCH");
  return same ? 0 : 1;
}

int cmd_prompt(Settings & s, bool gripper, const std::string & elites_from, bool hash_only)
{
  load_config_file(s);
  const TaskSpec task = resolve_task(s);
  PromptOptions o = prompt_options(s, task);
  o.gripper = gripper;
  const Mission m = mission_from_string(s.mission);
  if (!elites_from.empty()) {
    const RunArchive a = load_run(elites_from);
    const IterationRecord & last = a.iterations.back();
    for (const auto & id : last.elite_ids) {
      o.elites.push_back(to_elite(*a.find(id)));
    }
  }
  const PromptBundle b = compose_prompt(m, task, task.config, o);
  if (hash_only) {
    std::printf("%s\n", b.hash().c_str());
  } else {
    std::printf("%s\n", b.text().c_str());
  }
  return 0;
}

int cmd_scene(const std::string & task_name, std::uint64_t seed, const std::string & out, const std::string & png)
{
  const SceneState scene = build_scene(get_task(task_name), seed);
  if (!png.empty()) {
    const auto bytes = encode_png(render_top_view(scene));
    spit(png, std::string(bytes.begin(), bytes.end()));
  }
  if (!out.empty()) {
    save_scene(scene, out);
  } else if (png.empty()) {
    std::printf("%s\n", to_json(scene).dump(2).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Tool and action co-design with generative designers"};
  app.require_subcommand(1);

  app.add_subcommand("list-tasks", "Print the built-in tasks and their default settings");

  Settings run_s;
  std::string run_out = "runs/latest";
  auto * run_cmd = app.add_subcommand("run", "Run the evolutionary design loop");
  add_run_options(run_cmd, run_s);
  run_cmd->add_option("--backend", run_s.backend, "Simulator backend")->check(CLI::IsMember({"builtin"}));
  run_cmd->add_option("--generator", run_s.generator, "mock or http")->check(CLI::IsMember({"mock", "http"}));
  run_cmd->add_option("--seed", run_s.seed, "Generator seed");
  run_cmd->add_option("--out", run_out, "Run directory");
  run_cmd->add_option("--threads", run_s.threads, "Simulation worker threads (0 = all cores)");
  run_cmd->add_flag("--planted", run_s.planted, "Plant the known BringCube design in the mock generator");

  std::string report_dir;
  std::string report_out;
  auto * report_cmd = app.add_subcommand("report", "Export the best design and reward tables of a run");
  report_cmd->add_option("run_dir", report_dir, "Run directory")->required()->check(CLI::ExistingPath);
  report_cmd->add_option("--out", report_out, "Output directory (default <run_dir>/report)");

  std::string replay_dir;
  std::string replay_id;
  std::string replay_log;
  std::string replay_scene;
  auto * replay_cmd = app.add_subcommand("replay", "Re-simulate an archived candidate and compare its fitness");
  replay_cmd->add_option("run_dir", replay_dir, "Run directory")->required()->check(CLI::ExistingPath);
  replay_cmd->add_option("--id", replay_id, "Candidate id (default: best)");
  replay_cmd->add_option("--log", replay_log, "Write the state log as JSON lines");
  replay_cmd->add_option("--scene-file", replay_scene, "Scene file for runs made with --scene-file");

  Settings prompt_s;
  bool prompt_gripper = false;
  bool prompt_hash = false;
  std::string prompt_elites;
  auto * prompt_cmd = app.add_subcommand("prompt", "Print a composed prompt");
  add_run_options(prompt_cmd, prompt_s);
  prompt_cmd->add_flag("--gripper", prompt_gripper, "Design for the gripper fingers");
  prompt_cmd->add_option("--elites-from", prompt_elites, "Run directory whose last elites are embedded");
  prompt_cmd->add_flag("--hash", prompt_hash, "Print only the prompt hash");

  std::string scene_task = "BringCube";
  std::uint64_t scene_seed = 0;
  std::string scene_out;
  std::string scene_png;
  auto * scene_cmd = app.add_subcommand("scene", "Print, save or render a task scene");
  scene_cmd->add_option("--task", scene_task, "Task name");
  scene_cmd->add_option("--seed", scene_seed, "Scene seed (0 = canonical layout)");
  scene_cmd->add_option("--out", scene_out, "Write the scene JSON here");
  scene_cmd->add_option("--png", scene_png, "Write a top-view PNG here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-tasks")) {
      return cmd_list_tasks();
    }
    if (app.got_subcommand(run_cmd)) {
      return cmd_run(run_s, run_out);
    }
    if (app.got_subcommand(report_cmd)) {
      return cmd_report(report_dir, report_out);
    }
    if (app.got_subcommand(replay_cmd)) {
      return cmd_replay(replay_dir, replay_id, replay_log, replay_scene);
    }
    if (app.got_subcommand(prompt_cmd)) {
      return cmd_prompt(prompt_s, prompt_gripper, prompt_elites, prompt_hash);
    }
    if (app.got_subcommand(scene_cmd)) {
      return cmd_scene(scene_task, scene_seed, scene_out, scene_png);
    }
  } catch (const std::exception & e) {
    std::fprintf(stderr, "toolsmith: %s\n", e.what());
    return 2;
  }
  return 0;
}
