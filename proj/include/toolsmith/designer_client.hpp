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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "toolsmith/prompts.hpp"
#include "toolsmith/response_parser.hpp"

namespace toolsmith
{

class GeneratorError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class AllAgentsFailed : public std::runtime_error
{
public:
  explicit AllAgentsFailed(std::vector<std::string> errors);
  const std::vector<std::string> & errors() const { return errors_; }

private:
  std::vector<std::string> errors_;
};

struct Usage
{
  long prompt_tokens = 0;
  long completion_tokens = 0;
  double seconds = 0.0;
};

struct Completion
{
  std::string text;
  Usage usage;
};

/// A text generator. Implementations must allow concurrent complete() calls.
class GeneratorBackend
{
public:
  virtual ~GeneratorBackend() = default;
  virtual std::string identity() const = 0;
  /// Throws GeneratorError (or anything derived from std::exception) on failure.
  virtual Completion complete(const PromptBundle & bundle, int agent_id) const = 0;
};

struct DesignResponse
{
  int agent_id = 0;
  std::string prompt_hash;
  std::string raw_text;
  std::vector<DesignBundle> parsed;
  ParseReport report;
  Usage usage;
  std::optional<std::string> error;

  std::size_t candidate_count() const;
};

nlohmann::json to_json(const DesignResponse & r);

/// Same bundle for every agent. Agents run concurrently and share nothing.
std::vector<DesignResponse> fan_out(const GeneratorBackend & backend, const PromptBundle & bundle, int n_agent);
/// One bundle per agent (agents may differ in gripper mode).
std::vector<DesignResponse> fan_out(const GeneratorBackend & backend, const std::vector<PromptBundle> & bundles);

/// Per-agent bundles where `gripper_share` of the agents design
/// for the fingers. Tasks without a gripper get flange bundles only.
std::vector<PromptBundle> agent_bundles(
  Mission mission, const TaskSpec & task, const EvolutionConfig & config, const PromptOptions & options,
  double gripper_share = 0.5);

}  // namespace toolsmith
