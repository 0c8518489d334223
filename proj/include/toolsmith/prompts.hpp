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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "toolsmith/tasks.hpp"
#include "toolsmith/trajectory.hpp"

namespace toolsmith
{

enum class Mission
{
  InitialSampling,
  Evolution,
  NoTool,
  HumanSpec,
  FixedTool,
};

const char * to_string(Mission m);
/// Throws std::invalid_argument for unknown names.
Mission mission_from_string(const std::string & name);

class MissingTemplate : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class MissingElites : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Versioned prompt text files indexed by a templates.json manifest.
class TemplateLibrary
{
public:
  static TemplateLibrary load(const std::filesystem::path & dir);
  /// The library shipped under data_dir()/prompts.
  static const TemplateLibrary & builtin();

  const std::string & version() const { return version_; }
  bool has(const std::string & id) const { return texts_.count(id) != 0; }
  /// Throws MissingTemplate.
  const std::string & text(const std::string & id) const;
  /// Replaces `{name}` placeholders found in `vars`; other braces are kept.
  std::string render(const std::string & id, const std::map<std::string, std::string> & vars) const;

  void set(const std::string & id, std::string text) { texts_[id] = std::move(text); }
  void remove(const std::string & id) { texts_.erase(id); }

private:
  std::string version_;
  std::map<std::string, std::string> texts_;
};

/// A prior design shown to the model during evolution.
struct EliteDesign
{
  std::string id;
  std::string urdf;
  ActionPlan plan;
  double reward = 0.0;
  double distance = 0.0;
};

nlohmann::json to_json(const EliteDesign & e);
EliteDesign elite_from_json(const nlohmann::json & j);

struct PromptSection
{
  std::string id;
  std::string text;
};

struct PromptBundle
{
  Mission mission = Mission::InitialSampling;
  std::string task_name;
  bool gripper = false;
  int n_tool = 1;
  int n_action = 1;
  std::vector<PromptSection> sections;
  std::vector<EliteDesign> elites;
  std::optional<std::string> fixed_tool;
  std::optional<std::vector<std::uint8_t>> image;
  std::optional<std::string> env_code;
  std::string template_version;

  /// Sections joined by blank lines.
  std::string text() const;
  /// SHA-256 over the text and image bytes, lowercase hex.
  std::string hash() const;
  std::size_t row_width() const { return gripper ? 7 : 6; }
  /// NoTool and FixedTool responses carry plans only.
  bool expects_tools() const { return mission != Mission::NoTool && mission != Mission::FixedTool; }
  std::vector<std::string> section_ids() const;
};

struct PromptOptions
{
  /// Design for the gripper fingers (7-number waypoints).
  bool gripper = false;
  std::vector<EliteDesign> elites;
  std::string human_prompt;
  std::optional<std::string> fixed_tool;
  std::optional<std::string> env_code;
  std::optional<std::vector<std::uint8_t>> image;
};

/// Section ids, in order, for a mission.
std::vector<std::string> section_plan(Mission mission, bool gripper, bool with_env_code);

PromptBundle compose_prompt(
  Mission mission, const TaskSpec & task, const EvolutionConfig & config, const PromptOptions & options = {},
  const TemplateLibrary & templates = TemplateLibrary::builtin());

}  // namespace toolsmith
