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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "toolsmith/designer_client.hpp"
#include "toolsmith/sim.hpp"
#include "toolsmith/tasks.hpp"
#include "toolsmith/trajectory.hpp"
#include "toolsmith/urdf_model.hpp"

namespace toolsmith
{

class EmptyPopulation : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Lineage
{
  int iteration = 0;
  int agent_id = 0;
  int tool_index = 0;
  int plan_index = 0;
  /// Ids of the elites shown to the agent.
  std::vector<std::string> parents;
};

struct FitnessRecord
{
  double reward = 0.0;
  double distance = 0.0;
  std::vector<Diagnostic> diagnostics;
  std::uint64_t rollout_seed = 0;
  std::optional<std::string> error;
};

struct DesignCandidate
{
  std::string id;
  /// No links for plan-only missions.
  ToolDesign tool;
  ActionPlan plan;
  Lineage lineage;
  std::optional<FitnessRecord> fitness;
};

std::string candidate_id(int iteration, int agent, int tool, int plan);

/// Reward descending, then distance ascending, then `a_index < b_index`.
bool ranks_before(const DesignCandidate & a, std::size_t a_index, const DesignCandidate & b, std::size_t b_index);

/// Where candidates come from.
struct DesignClient
{
  const GeneratorBackend * generator = nullptr;
  /// Mission of the first round and of restarts.
  Mission initial_mission = Mission::InitialSampling;
  /// Fraction of agents asked for finger tools when the task has a gripper.
  double gripper_share = 0.5;
  /// human_prompt, fixed_tool, env_code and image are passed through.
  PromptOptions options;
};

struct SampleOutcome
{
  Mission mission = Mission::InitialSampling;
  bool restart = false;
  std::vector<PromptBundle> prompts;
  std::vector<DesignResponse> responses;
  std::vector<DesignCandidate> candidates;
};

/// Throws EmptyPopulation when no agent yields a usable candidate.
SampleOutcome sample_population(
  const DesignClient & client, const TaskSpec & task, const EvolutionConfig & config, int iteration,
  const std::vector<DesignCandidate> & elites);

struct EvaluationOptions
{
  /// Rewards are averaged over these scene seeds; the first one is the canonical scene.
  std::vector<std::uint64_t> scene_seeds{0};
  /// Worker threads per batch; 0 means hardware concurrency.
  unsigned threads = 0;
};

FitnessRecord evaluate_candidate(
  const DesignCandidate & candidate, const TaskSpec & task, const SimulatorBackend & backend,
  const std::vector<SceneState> & scenes, const std::vector<std::uint64_t> & seeds);

/// Evaluates k_sim candidates at a time. Results do not depend on batching.
void evaluate_population(
  std::vector<DesignCandidate> & candidates, const TaskSpec & task, const SimulatorBackend & backend, int k_sim,
  const EvaluationOptions & options = {});

/// Best k_top by rank, then those with reward above reward_save.
std::vector<DesignCandidate> select_elites(
  const std::vector<DesignCandidate> & candidates, int k_top, double reward_save);

EliteDesign to_elite(const DesignCandidate & c);

struct IterationRecord
{
  int iteration = 0;
  Mission mission = Mission::InitialSampling;
  bool restart = false;
  std::vector<std::string> prompt_hashes;
  std::vector<DesignResponse> responses;
  std::vector<DesignCandidate> candidates;
  std::vector<std::string> elite_ids;
  std::optional<std::string> error;
  double seconds = 0.0;
};

struct RunArchive
{
  std::string task;
  EvolutionConfig config;
  RewardConstants constants;
  std::uint64_t seed = 0;
  std::string generator;
  std::string backend;
  std::vector<IterationRecord> iterations;
  /// Best reward seen up to and including each iteration.
  std::vector<double> best_so_far;
  std::optional<DesignCandidate> best;
  /// Prompt texts by hash, for audit.
  std::map<std::string, std::string> prompts;

  const DesignCandidate * find(const std::string & id) const;
};

struct RunOptions
{
  std::uint64_t seed = 0;
  EvaluationOptions evaluation;
  /// Called after every iteration.
  std::function<void(const IterationRecord &, double best)> on_iteration;
};

/// Throws EmptyPopulation only when every iteration came back empty.
RunArchive run(
  const TaskSpec & task, const EvolutionConfig & config, const DesignClient & client,
  const SimulatorBackend & backend, const RunOptions & options = {});

}  // namespace toolsmith
