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
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "toolsmith/sim.hpp"

namespace toolsmith
{

class NotFound : public std::out_of_range
{
public:
  using std::out_of_range::out_of_range;
};

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Root of the shipped data files; TOOLSMITH_DATA_DIR in the environment
/// overrides the build-time location.
std::filesystem::path data_dir();

struct EvolutionConfig
{
  int n_agent = 1;
  int n_tool = 1;
  int n_action = 1;
  int k_top = 1;
  double reward_save = 0.0;
  int n_iteration = 1;
  int k_sim = 1;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
  std::size_t max_population() const
  {
    return static_cast<std::size_t>(n_agent) * n_tool * n_action;
  }
};

bool operator==(const EvolutionConfig & a, const EvolutionConfig & b);
nlohmann::json to_json(const EvolutionConfig & c);
/// Fields present in `j` replace those of `base`; unknown keys are errors.
EvolutionConfig apply_overrides(const EvolutionConfig & base, const nlohmann::json & j);

/// Reward weights and thresholds that the task prose leaves open.
struct RewardConstants
{
  double high_object_w1 = 0.7;
  double high_object_w2 = 0.3;
  double move_ball_w1 = 0.8;
  double move_ball_w2 = 0.2;
  double move_ball_v_cap = 0.5;
  double one_book_w1 = 1.0;
  double one_book_delta_still = 0.005;
  double turkey_legs_delta_pot = 0.01;
  double gather_spheres_cap = 0.3;
  double lift_box_threshold = 0.25;
  double elevate_plate_target = 0.25;
};

bool operator==(const RewardConstants & a, const RewardConstants & b);
nlohmann::json to_json(const RewardConstants & c);
RewardConstants apply_overrides(const RewardConstants & base, const nlohmann::json & j);
RewardConstants load_reward_constants(const std::filesystem::path & path);

using RewardFn = std::function<double(const SceneState &, const SceneState &, const RewardConstants &)>;
using SceneBuilder = std::function<SceneState(std::uint64_t)>;

struct TaskSpec
{
  std::string name;
  SceneBuilder scene_builder;
  RewardFn reward_fn;
  EvolutionConfig config;
  bool gripper_allowed = false;
  std::string description;
  RewardConstants constants;

  /// Clamped to [0, 1].
  double reward(const SceneState & initial, const SceneState & final_state) const;
};

const std::vector<std::string> & task_names();
/// Throws NotFound for unknown names.
const TaskSpec & get_task(const std::string & name);
EvolutionConfig default_config(const std::string & task);
SceneState build_scene(const TaskSpec & task, std::uint64_t seed);

/// Reward functions addressable by task name (for scene files supplied by the user).
RewardFn reward_by_name(const std::string & name);
TaskSpec custom_task(
  const std::string & name, const std::filesystem::path & scene_file, const std::string & reward_name,
  const EvolutionConfig & config);

double reward_bring_cube(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_clean_table(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_dislodge_cube(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_elevate_plate(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_gather_spheres(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_high_object(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_lift_box(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_move_ball(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_one_book(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_score_goal(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_snatch_cookie(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);
double reward_turkey_legs(const SceneState & initial, const SceneState & final_state, const RewardConstants & k);

}  // namespace toolsmith
