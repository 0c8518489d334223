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

#include "toolsmith/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <set>
#include <thread>

#include "toolsmith/mock_generator.hpp"

namespace toolsmith
{

std::string candidate_id(int iteration, int agent, int tool, int plan)
{
  return "i" + std::to_string(iteration) + "-a" + std::to_string(agent) + "-t" + std::to_string(tool) + "-p" +
         std::to_string(plan);
}

bool ranks_before(const DesignCandidate & a, std::size_t a_index, const DesignCandidate & b, std::size_t b_index)
{
  const double ra = a.fitness ? a.fitness->reward : 0.0;
  const double rb = b.fitness ? b.fitness->reward : 0.0;
  if (ra != rb) {
    return ra > rb;
  }
  const double da = a.fitness ? a.fitness->distance : 0.0;
  const double db = b.fitness ? b.fitness->distance : 0.0;
  if (da != db) {
    return da < db;
  }
  return a_index < b_index;
}

EliteDesign to_elite(const DesignCandidate & c)
{
  EliteDesign e;
  e.id = c.id;
  e.urdf = serialize_tool_fragment(c.tool);
  e.plan = c.plan;
  if (c.fitness) {
    e.reward = c.fitness->reward;
    e.distance = c.fitness->distance;
  }
  return e;
}

SampleOutcome sample_population(
  const DesignClient & client, const TaskSpec & task, const EvolutionConfig & config, int iteration,
  const std::vector<DesignCandidate> & elites)
{
  if (client.generator == nullptr) {
    throw std::invalid_argument("design client has no generator");
  }
  if (iteration == 0 && !elites.empty()) {
    throw std::invalid_argument("the first iteration takes no elites");
  }
  SampleOutcome out;
  const bool tool_mission = client.initial_mission != Mission::NoTool && client.initial_mission != Mission::FixedTool;
  out.restart = iteration > 0 && elites.empty();
  out.mission = iteration > 0 && !elites.empty() && tool_mission ? Mission::Evolution : client.initial_mission;

  PromptOptions options = client.options;
  std::vector<std::string> parents;
  if (!elites.empty()) {
    for (const auto & e : elites) {
      options.elites.push_back(to_elite(e));
      parents.push_back(e.id);
    }
  }
  out.prompts = agent_bundles(out.mission, task, config, options, client.gripper_share);
  out.responses = fan_out(*client.generator, out.prompts);

  // Evolved tools should be one edit from an elite or splice two of them.
  // Violations are logged, not rejected.
  if (out.mission == Mission::Evolution) {
    for (auto & r : out.responses) {
      for (std::size_t t = 0; t < r.parsed.size(); ++t) {
        if (!r.parsed[t].tool) {
          continue;
        }
        const ToolDesign & tool = *r.parsed[t].tool;
        bool ok = false;
        for (std::size_t a = 0; a < elites.size() && !ok; ++a) {
          ok = structural_diff(tool, elites[a].tool) <= 1;
          for (std::size_t b = 0; b < elites.size() && !ok; ++b) {
            ok = a != b && combines(tool, elites[a].tool, elites[b].tool);
          }
        }
        if (!ok) {
          r.report.add("edit_rule", "tool " + std::to_string(t) + " is neither one edit from an elite nor a splice");
        }
      }
    }
  }

  for (const auto & r : out.responses) {
    int tool_index = 0;
    for (const auto & bundle : r.parsed) {
      for (std::size_t p = 0; p < bundle.plans.size(); ++p) {
        DesignCandidate c;
        c.id = candidate_id(iteration, r.agent_id, tool_index, static_cast<int>(p));
        c.tool = bundle.tool.value_or(ToolDesign{});
        c.plan = bundle.plans[p];
        c.lineage = Lineage{iteration, r.agent_id, tool_index, static_cast<int>(p), parents};
        out.candidates.push_back(std::move(c));
      }
      ++tool_index;
    }
  }
  if (out.candidates.size() > config.max_population()) {
    out.candidates.resize(config.max_population());
  }
  if (out.candidates.empty()) {
    throw EmptyPopulation("iteration " + std::to_string(iteration) + " produced no valid candidates");
  }
  return out;
}

FitnessRecord evaluate_candidate(
  const DesignCandidate & candidate, const TaskSpec & task, const SimulatorBackend & backend,
  const std::vector<SceneState> & scenes, const std::vector<std::uint64_t> & seeds)
{
  FitnessRecord f;
  f.rollout_seed = seeds.front();
  try {
    const bool gripper = candidate.tool.uses_gripper() || candidate.plan.uses_gripper();
    const RobotDescription robot = merge(blank_robot(gripper), candidate.tool);
    const DenseTrajectory traj = densify(candidate.plan);
    double total = 0.0;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      RolloutResult r = backend.rollout(scenes[i], robot, traj);
      total += task.reward(scenes[i], r.final_state);
      if (i == 0) {
        f.distance = r.trajectory_length;
        f.diagnostics = std::move(r.diagnostics);
      }
    }
    f.reward = total / static_cast<double>(scenes.size());
  } catch (const std::exception & e) {
    f.reward = 0.0;
    f.error = e.what();
    f.diagnostics.push_back(Diagnostic{"rollout_error", candidate.id, 0, 1, 0.0});
  }
  return f;
}

void evaluate_population(
  std::vector<DesignCandidate> & candidates, const TaskSpec & task, const SimulatorBackend & backend, int k_sim,
  const EvaluationOptions & options)
{
  if (k_sim < 1) {
    throw std::invalid_argument("k_sim must be at least 1");
  }
  if (options.scene_seeds.empty()) {
    throw std::invalid_argument("at least one scene seed is needed");
  }
  std::vector<SceneState> scenes;
  for (auto s : options.scene_seeds) {
    scenes.push_back(build_scene(task, s));
  }
  unsigned workers = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(k_sim));

  std::vector<std::unique_ptr<SimulatorBackend>> clones;
  if (!backend.concurrent_safe()) {
    for (unsigned w = 0; w < workers; ++w) {
      clones.push_back(backend.clone());
    }
  }
  for (std::size_t begin = 0; begin < candidates.size(); begin += static_cast<std::size_t>(k_sim)) {
    const std::size_t end = std::min(candidates.size(), begin + static_cast<std::size_t>(k_sim));
    std::atomic<std::size_t> next{begin};
    auto work = [&](unsigned w) {
      const SimulatorBackend & b = clones.empty() ? backend : *clones[w];
      for (std::size_t i = next++; i < end; i = next++) {
        candidates[i].fitness = evaluate_candidate(candidates[i], task, b, scenes, options.scene_seeds);
      }
    };
    const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(end - begin));
    if (n <= 1) {
      work(0);
      continue;
    }
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < n; ++w) {
      threads.emplace_back(work, w);
    }
    for (auto & t : threads) {
      t.join();
    }
  }
}

std::vector<DesignCandidate> select_elites(
  const std::vector<DesignCandidate> & candidates, int k_top, double reward_save)
{
  for (const auto & c : candidates) {
    if (!c.fitness) {
      throw std::invalid_argument("candidate " + c.id + " has not been evaluated");
    }
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks_before(candidates[a], a, candidates[b], b);
  });
  std::vector<DesignCandidate> elites;
  for (std::size_t i = 0; i < order.size() && static_cast<int>(i) < k_top; ++i) {
    const DesignCandidate & c = candidates[order[i]];
    if (c.fitness->reward > reward_save) {
      elites.push_back(c);
    }
  }
  return elites;
}

const DesignCandidate * RunArchive::find(const std::string & id) const
{
  for (const auto & it : iterations) {
    for (const auto & c : it.candidates) {
      if (c.id == id) {
        return &c;
      }
    }
  }
  return nullptr;
}

RunArchive run(
  const TaskSpec & task, const EvolutionConfig & config, const DesignClient & client,
  const SimulatorBackend & backend, const RunOptions & options)
{
  config.validate();
  RunArchive archive;
  archive.task = task.name;
  archive.config = config;
  archive.constants = task.constants;
  archive.seed = options.seed;
  archive.generator = client.generator != nullptr ? client.generator->identity() : "";
  archive.backend = backend.name();

  std::vector<DesignCandidate> elites;
  std::optional<std::pair<DesignCandidate, std::size_t>> best;
  std::size_t seen = 0;
  for (int i = 0; i < config.n_iteration; ++i) {
    const auto start = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = i;
    try {
      SampleOutcome s = sample_population(client, task, config, i, elites);
      rec.mission = s.mission;
      rec.restart = s.restart;
      for (const auto & p : s.prompts) {
        rec.prompt_hashes.push_back(p.hash());
        archive.prompts.emplace(p.hash(), p.text());
      }
      rec.responses = std::move(s.responses);
      rec.candidates = std::move(s.candidates);
      evaluate_population(rec.candidates, task, backend, config.k_sim, options.evaluation);
      elites = select_elites(rec.candidates, config.k_top, config.reward_save);
    } catch (const EmptyPopulation & e) {
      rec.error = e.what();
      elites.clear();
    } catch (const AllAgentsFailed & e) {
      rec.error = e.what();
      elites.clear();
    }
    for (const auto & e : elites) {
      rec.elite_ids.push_back(e.id);
    }
    for (std::size_t k = 0; k < rec.candidates.size(); ++k) {
      // Global index keeps the earlier iteration ahead on exact ties.
      const std::size_t index = seen + k;
      if (!best || ranks_before(rec.candidates[k], index, best->first, best->second)) {
        best = {rec.candidates[k], index};
      }
    }
    seen += rec.candidates.size();
    archive.best_so_far.push_back(best ? best->first.fitness->reward : 0.0);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    archive.iterations.push_back(std::move(rec));
    if (options.on_iteration) {
      options.on_iteration(archive.iterations.back(), archive.best_so_far.back());
    }
  }
  if (!best) {
    throw EmptyPopulation("no iteration produced a valid candidate");
  }
  archive.best = best->first;
  return archive;
}

}  // namespace toolsmith
