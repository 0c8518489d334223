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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "toolsmith/prompts.hpp"
#include "toolsmith/trajectory.hpp"
#include "toolsmith/urdf_model.hpp"

namespace toolsmith
{

/// One tool together with the plans proposed for it. `tool` is empty when the
/// response carries plans only and no fixed tool was given.
struct DesignBundle
{
  std::string tool_text;
  std::optional<ToolDesign> tool;
  std::vector<ActionPlan> plans;
};

struct ReportEntry
{
  /// Short machine-readable tag, e.g. "row_width" or "invalid_tool".
  std::string kind;
  std::string detail;
};

struct ParseReport
{
  std::vector<ReportEntry> entries;
  std::size_t tools_found = 0;
  std::size_t plans_found = 0;

  bool has(const std::string & kind) const;
  std::size_t count(const std::string & kind) const;
  void add(std::string kind, std::string detail) { entries.push_back({std::move(kind), std::move(detail)}); }
};

struct ParseExpectation
{
  int n_tool = 1;
  int n_action = 1;
  std::size_t row_width = 6;
  bool expects_tools = true;
  /// Used for plan-only responses.
  std::optional<ToolDesign> fixed_tool;
};

ParseExpectation expectation_for(const PromptBundle & bundle);

struct ParseResult
{
  std::vector<DesignBundle> bundles;
  ParseReport report;

  /// Tool-plan pairs.
  std::size_t candidate_count() const;
};

/// Never throws on bad input; problems end up in the report.
ParseResult parse_response(const std::string & raw_text, const ParseExpectation & expected);

struct FencedBlock
{
  std::string lang;
  std::string body;
  bool terminated = true;
};

std::vector<FencedBlock> fenced_blocks(const std::string & text);

/// Reads waypoint arrays out of JSON or Python-ish list literals. A 2-D array
/// is one plan, a 3-D array is a list of plans.
std::optional<std::vector<std::vector<std::vector<double>>>> numeric_plans(const std::string & body);

}  // namespace toolsmith
