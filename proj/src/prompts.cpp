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

#include "toolsmith/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "toolsmith/digest.hpp"
#include "toolsmith/urdf_model.hpp"

namespace toolsmith
{
namespace
{

std::string read_file(const std::filesystem::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw MissingTemplate("cannot read template file " + p.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim_trailing_newlines(std::string s)
{
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) {
    s.pop_back();
  }
  return s;
}

std::string format_radius(double r)
{
  std::ostringstream ss;
  ss << r;
  return ss.str();
}

}  // namespace

const char * to_string(Mission m)
{
  switch (m) {
    case Mission::InitialSampling:
      return "initial_sampling";
    case Mission::Evolution:
      return "evolution";
    case Mission::NoTool:
      return "no_tool";
    case Mission::HumanSpec:
      return "human_spec";
    case Mission::FixedTool:
      return "fixed_tool";
  }
  return "unknown";
}

Mission mission_from_string(const std::string & name)
{
  for (Mission m : {Mission::InitialSampling, Mission::Evolution, Mission::NoTool, Mission::HumanSpec,
                    Mission::FixedTool})
  {
    if (name == to_string(m)) {
      return m;
    }
  }
  throw std::invalid_argument("unknown mission '" + name + "'");
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path & dir)
{
  const auto manifest_path = dir / "templates.json";
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception & e) {
    throw MissingTemplate(manifest_path.string() + ": " + e.what());
  }
  TemplateLibrary lib;
  lib.version_ = manifest.value("version", "");
  if (!manifest.contains("templates") || !manifest.at("templates").is_object()) {
    throw MissingTemplate(manifest_path.string() + " has no templates table");
  }
  for (const auto & [id, file] : manifest.at("templates").items()) {
    lib.texts_[id] = trim_trailing_newlines(read_file(dir / file.get<std::string>()));
  }
  return lib;
}

const TemplateLibrary & TemplateLibrary::builtin()
{
  static const TemplateLibrary lib = load(data_dir() / "prompts");
  return lib;
}

const std::string & TemplateLibrary::text(const std::string & id) const
{
  auto it = texts_.find(id);
  if (it == texts_.end()) {
    throw MissingTemplate("prompt template '" + id + "' is not available");
  }
  return it->second;
}

std::string TemplateLibrary::render(const std::string & id, const std::map<std::string, std::string> & vars) const
{
  const std::string & src = text(id);
  std::string out;
  out.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == '{') {
      std::size_t j = i + 1;
      while (j < src.size() && (std::islower(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      if (j < src.size() && src[j] == '}' && j > i + 1) {
        auto it = vars.find(src.substr(i + 1, j - i - 1));
        if (it != vars.end()) {
          out += it->second;
          i = j;
          continue;
        }
      }
    }
    out.push_back(src[i]);
  }
  return out;
}

nlohmann::json to_json(const EliteDesign & e)
{
  return {{"id", e.id},     {"reward", e.reward},         {"distance", e.distance},
          {"urdf", e.urdf}, {"actions", e.plan.to_json()}};
}

EliteDesign elite_from_json(const nlohmann::json & j)
{
  EliteDesign e;
  e.id = j.at("id").get<std::string>();
  e.urdf = j.at("urdf").get<std::string>();
  e.plan = ActionPlan::from_json(j.at("actions"));
  e.reward = j.value("reward", 0.0);
  e.distance = j.value("distance", 0.0);
  return e;
}

std::string PromptBundle::text() const
{
  std::string out;
  for (const auto & s : sections) {
    if (!out.empty()) {
      out += "\n\n";
    }
    out += s.text;
  }
  return out;
}

std::string PromptBundle::hash() const
{
  std::string data = text();
  if (image) {
    data.push_back('\0');
    data.append(image->begin(), image->end());
  }
  return sha256_hex(data);
}

std::vector<std::string> PromptBundle::section_ids() const
{
  std::vector<std::string> ids;
  for (const auto & s : sections) {
    ids.push_back(s.id);
  }
  return ids;
}

std::vector<std::string> section_plan(Mission mission, bool gripper, bool with_env_code)
{
  const std::string tool_spec = gripper ? "tool_spec_gripper" : "tool_spec_flange";
  const std::string action_spec = gripper ? "action_spec_7" : "action_spec_6";
  std::vector<std::string> context{"task_context"};
  if (with_env_code) {
    context.push_back("env_code");
  }
  std::vector<std::string> ids;
  auto append = [&ids](const std::vector<std::string> & more) { ids.insert(ids.end(), more.begin(), more.end()); };
  switch (mission) {
    case Mission::InitialSampling:
      append({"intro_initial"});
      append(context);
      append({"procedure", tool_spec, action_spec, "action_diversity", "frame", "output_format_tool"});
      break;
    case Mission::Evolution:
      append({"intro_evolution"});
      append(context);
      append({"elites", "procedure", "evolution", tool_spec, action_spec, "action_diversity", "frame",
              "output_format_tool"});
      break;
    case Mission::NoTool:
      append({"intro_no_tool"});
      append(context);
      append({"procedure", "action_spec_7", "action_diversity", "frame", "output_format_action"});
      break;
    case Mission::HumanSpec:
      append({"intro_human_spec"});
      append(context);
      append({"procedure", tool_spec, action_spec, "action_diversity", "frame", "output_format_tool"});
      break;
    case Mission::FixedTool:
      append({"intro_fixed_tool", "fixed_tool"});
      append(context);
      append({"procedure", action_spec, "action_diversity", "frame", "output_format_action"});
      break;
  }
  return ids;
}

PromptBundle compose_prompt(
  Mission mission, const TaskSpec & task, const EvolutionConfig & config, const PromptOptions & options,
  const TemplateLibrary & templates)
{
  if (mission == Mission::Evolution && options.elites.empty()) {
    throw MissingElites("evolution prompts need at least one prior design");
  }
  if (mission == Mission::FixedTool && !options.fixed_tool) {
    throw std::invalid_argument("fixed-tool prompts need the tool URDF");
  }
  PromptBundle b;
  b.mission = mission;
  b.task_name = task.name;
  // Without a tool the gripper is the only way to interact.
  b.gripper = mission == Mission::NoTool ? true : options.gripper;
  b.n_tool = mission == Mission::NoTool || mission == Mission::FixedTool ? 1 : config.n_tool;
  b.n_action = config.n_action;
  b.image = options.image;
  b.env_code = options.env_code;
  b.template_version = templates.version();
  if (mission == Mission::Evolution) {
    b.elites = options.elites;
  }
  if (mission == Mission::FixedTool) {
    b.fixed_tool = options.fixed_tool;
  }

  nlohmann::json elites = nlohmann::json::array();
  for (const auto & e : b.elites) {
    elites.push_back(to_json(e));
  }
  const std::map<std::string, std::string> vars{
    {"n_tool", std::to_string(b.n_tool)},
    {"n_action", std::to_string(b.n_action)},
    {"human_prompt", options.human_prompt},
    {"task_name", task.name},
    {"task_description", task.description},
    {"workspace_radius", format_radius(kWorkspaceRadius)},
    {"robot_urdf", serialize_robot(blank_robot(b.gripper))},
    {"env_code", options.env_code.value_or("")},
    {"elites_json", elites.dump(2)},
    {"tool_urdf", options.fixed_tool.value_or("")},
    {"row_width", std::to_string(b.row_width())},
  };
  for (const auto & id : section_plan(mission, b.gripper, options.env_code.has_value())) {
    b.sections.push_back({id, templates.render(id, vars)});
  }
  return b;
}

}  // namespace toolsmith
