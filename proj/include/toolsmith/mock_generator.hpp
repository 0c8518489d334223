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
#include <random>
#include <string>

#include "toolsmith/designer_client.hpp"

namespace toolsmith
{

struct MockOptions
{
  /// Plant a known BringCube design whose single-joint mutation scores 1.0.
  bool planted = false;
  /// Chance that an evolved design is a crossover when two elites exist.
  double crossover_rate = 0.3;
  /// Attempts before a failing mutation falls back to adding a box.
  int max_attempts = 20;
};

/// Offline generator. Output depends only on (seed, prompt hash, agent id).
class MockGenerator : public GeneratorBackend
{
public:
  explicit MockGenerator(std::uint64_t seed, MockOptions options = {});

  std::string identity() const override;
  Completion complete(const PromptBundle & bundle, int agent_id) const override;

  std::string generate(const PromptBundle & bundle, int agent_id) const;

private:
  std::uint64_t seed_;
  MockOptions options_;
};

inline std::string mock_generate(std::uint64_t seed, const PromptBundle & bundle, int agent_id = 0)
{
  return MockGenerator(seed).generate(bundle, agent_id);
}

/// The planted BringCube scraper; `improved` moves the blade toward the flange.
ToolDesign planted_tool(bool improved);
ActionPlan planted_plan();

/// Random valid box tree; flange tools hang from panda_virtual, gripper
/// tools from the two fingers.
ToolDesign random_tool(std::mt19937_64 & rng, bool gripper);
ActionPlan random_plan(std::mt19937_64 & rng, std::size_t row_width);

enum class EditKind
{
  Resize,
  Move,
  Rotate,
  Add,
  Remove,
  Crossover,
};

const char * to_string(EditKind k);

/// Exactly one structural change to `parent`, always valid.
ToolDesign mutate(const ToolDesign & parent, std::mt19937_64 & rng, int max_attempts, EditKind * applied = nullptr);
/// `a` with a subtree of `b` attached to its first root link.
ToolDesign crossover(const ToolDesign & a, const ToolDesign & b, std::mt19937_64 & rng);

/// Number of links and joints that differ between the two designs, matched by
/// name (a link and the joint holding it count as one component when added or removed).
std::size_t structural_diff(const ToolDesign & a, const ToolDesign & b, double tol = 1e-9);
/// True when `child` keeps every link of `a` and carries at least one link
/// taken from `b` (same box size, name possibly suffixed).
bool combines(const ToolDesign & child, const ToolDesign & a, const ToolDesign & b, double tol = 1e-9);

}  // namespace toolsmith
