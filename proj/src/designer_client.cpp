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

#include "toolsmith/designer_client.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace toolsmith
{
namespace
{

std::string join(const std::vector<std::string> & parts)
{
  std::string out;
  for (const auto & p : parts) {
    out += out.empty() ? p : "; " + p;
  }
  return out;
}

}  // namespace

AllAgentsFailed::AllAgentsFailed(std::vector<std::string> errors)
: std::runtime_error("every design agent failed: " + join(errors)), errors_(std::move(errors))
{
}

std::size_t DesignResponse::candidate_count() const
{
  std::size_t n = 0;
  for (const auto & b : parsed) {
    n += b.plans.size();
  }
  return n;
}

nlohmann::json to_json(const DesignResponse & r)
{
  nlohmann::json report = nlohmann::json::array();
  for (const auto & e : r.report.entries) {
    report.push_back({{"kind", e.kind}, {"detail", e.detail}});
  }
  nlohmann::json j{
    {"agent_id", r.agent_id},
    {"prompt_hash", r.prompt_hash},
    {"tools_found", r.report.tools_found},
    {"plans_found", r.report.plans_found},
    {"report", report},
    {"usage", {{"prompt_tokens", r.usage.prompt_tokens}, {"completion_tokens", r.usage.completion_tokens}}},
  };
  if (r.error) {
    j["error"] = *r.error;
  }
  return j;
}

std::vector<DesignResponse> fan_out(const GeneratorBackend & backend, const PromptBundle & bundle, int n_agent)
{
  if (n_agent < 1) {
    throw std::invalid_argument("n_agent must be at least 1");
  }
  return fan_out(backend, std::vector<PromptBundle>(static_cast<std::size_t>(n_agent), bundle));
}

std::vector<DesignResponse> fan_out(const GeneratorBackend & backend, const std::vector<PromptBundle> & bundles)
{
  if (bundles.empty()) {
    throw std::invalid_argument("fan_out needs at least one agent");
  }
  std::vector<DesignResponse> responses(bundles.size());
  auto work = [&](std::size_t i) {
    DesignResponse & r = responses[i];
    r.agent_id = static_cast<int>(i);
    r.prompt_hash = bundles[i].hash();
    try {
      Completion c = backend.complete(bundles[i], r.agent_id);
      r.raw_text = std::move(c.text);
      r.usage = c.usage;
    } catch (const std::exception & e) {
      r.error = e.what();
      r.report.add("agent_error", e.what());
      return;
    }
    try {
      ParseResult parsed = parse_response(r.raw_text, expectation_for(bundles[i]));
      r.parsed = std::move(parsed.bundles);
      r.report = std::move(parsed.report);
    } catch (const std::exception & e) {
      r.report.add("parse_error", e.what());
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(bundles.size());
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    threads.emplace_back(work, i);
  }
  for (auto & t : threads) {
    t.join();
  }
  std::vector<std::string> errors;
  for (const auto & r : responses) {
    if (r.error) {
      errors.push_back("agent " + std::to_string(r.agent_id) + ": " + *r.error);
    }
  }
  if (errors.size() == responses.size()) {
    throw AllAgentsFailed(std::move(errors));
  }
  return responses;
}

std::vector<PromptBundle> agent_bundles(
  Mission mission, const TaskSpec & task, const EvolutionConfig & config, const PromptOptions & options,
  double gripper_share)
{
  const int n = config.n_agent;
  const int n_gripper = task.gripper_allowed && mission != Mission::NoTool
                          ? static_cast<int>(std::floor(std::clamp(gripper_share, 0.0, 1.0) * n + 1e-9))
                          : 0;
  PromptOptions flange = options;
  flange.gripper = mission == Mission::NoTool;
  PromptOptions fingers = options;
  fingers.gripper = true;
  const PromptBundle flange_bundle = compose_prompt(mission, task, config, flange);
  std::optional<PromptBundle> gripper_bundle;
  if (n_gripper > 0) {
    gripper_bundle = compose_prompt(mission, task, config, fingers);
  }
  // Interleave so a truncated batch still has both kinds.
  std::vector<PromptBundle> bundles;
  int placed = 0;
  for (int i = 0; i < n; ++i) {
    const bool want = n_gripper > 0 && (i % 2 == 1 || n - i <= n_gripper - placed) && placed < n_gripper;
    if (want) {
      bundles.push_back(*gripper_bundle);
      ++placed;
    } else {
      bundles.push_back(flange_bundle);
    }
  }
  return bundles;
}

}  // namespace toolsmith
