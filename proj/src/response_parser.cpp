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

#include "toolsmith/response_parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <regex>

#include "json.hpp"

namespace toolsmith
{
namespace
{

using RawPlan = std::vector<std::vector<double>>;

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool blank(const std::string & s)
{
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

bool is_tool_block(const FencedBlock & b)
{
  const std::string lang = lower(b.lang);
  if (lang == "xml" || lang == "urdf") {
    return true;
  }
  if (lang == "json") {
    return false;
  }
  // A JSON document may carry URDF inside its strings.
  const auto first = b.body.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (b.body[first] == '{' || b.body[first] == '[')) {
    return false;
  }
  return b.body.find("<link") != std::string::npos || b.body.find("<joint") != std::string::npos;
}

bool is_ident_start(char c)
{
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_ident_char(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.';
}

// Rewrites list literals written as Python/numpy into plain JSON arrays.
std::string to_json_arrays(const std::string & body)
{
  std::string out;
  std::vector<bool> paren_is_call;
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];
    if (c == '#' || (c == '/' && i + 1 < body.size() && body[i + 1] == '/')) {
      while (i < body.size() && body[i] != '\n') {
        ++i;
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      while (i < body.size() &&
             (std::isdigit(static_cast<unsigned char>(body[i])) || std::strchr(".eE+-", body[i]) != nullptr))
      {
        out.push_back(body[i++]);
      }
      continue;
    }
    if (is_ident_start(c)) {
      while (i < body.size() && is_ident_char(body[i])) {
        ++i;
      }
      std::size_t j = i;
      while (j < body.size() && (body[j] == ' ' || body[j] == '\t')) {
        ++j;
      }
      if (j < body.size() && body[j] == '(') {
        paren_is_call.push_back(true);
        i = j + 1;
      }
      continue;
    }
    switch (c) {
      case '(':
        paren_is_call.push_back(false);
        out.push_back('[');
        break;
      case ')':
        if (!paren_is_call.empty()) {
          if (!paren_is_call.back()) {
            out.push_back(']');
          }
          paren_is_call.pop_back();
        }
        break;
      case '[':
      case ']':
      case ',':
      case ' ':
      case '\t':
      case '\n':
        out.push_back(c);
        break;
      default:
        // `=`, `;`, stray punctuation
        out.push_back(' ');
        break;
    }
    ++i;
  }
  static const std::regex trailing_comma(R"(,\s*\])");
  return std::regex_replace(out, trailing_comma, "]");
}

// Top-level [...] segments.
std::vector<std::string> bracket_segments(const std::string & s)
{
  std::vector<std::string> segments;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') {
      if (depth == 0) {
        start = i;
      }
      ++depth;
    } else if (s[i] == ']' && depth > 0) {
      if (--depth == 0) {
        segments.push_back(s.substr(start, i - start + 1));
      }
    }
  }
  return segments;
}

int depth_of(const nlohmann::json & j)
{
  if (j.is_number()) {
    return 0;
  }
  if (!j.is_array()) {
    return -1;
  }
  if (j.empty()) {
    return 1;
  }
  const int inner = depth_of(j.front());
  return inner < 0 ? -1 : inner + 1;
}

std::optional<RawPlan> rows_of(const nlohmann::json & plan)
{
  RawPlan rows;
  for (const auto & row : plan) {
    if (!row.is_array()) {
      return std::nullopt;
    }
    std::vector<double> values;
    for (const auto & v : row) {
      if (!v.is_number()) {
        return std::nullopt;
      }
      values.push_back(v.get<double>());
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

std::optional<std::vector<RawPlan>> plans_from_json(const nlohmann::json & j)
{
  if (j.is_object()) {
    for (const char * key : {"actions", "plans", "action_sets", "waypoints"}) {
      if (j.contains(key)) {
        return plans_from_json(j.at(key));
      }
    }
    return std::nullopt;
  }
  std::vector<RawPlan> plans;
  switch (depth_of(j)) {
    case 1:
      if (j.empty()) {
        return plans;
      }
      if (auto rows = rows_of(nlohmann::json::array({j}))) {
        plans.push_back(*rows);
        return plans;
      }
      return std::nullopt;
    case 2:
      if (auto rows = rows_of(j)) {
        plans.push_back(*rows);
        return plans;
      }
      return std::nullopt;
    case 3:
      for (const auto & p : j) {
        auto rows = rows_of(p);
        if (!rows) {
          return std::nullopt;
        }
        plans.push_back(*rows);
      }
      return plans;
    default:
      return std::nullopt;
  }
}

struct Group
{
  std::optional<std::string> tool_text;
  std::vector<RawPlan> plans;
};

// {"tools": [{"urdf": "...", "actions": [...]}, ...]}
bool read_tools_object(const nlohmann::json & j, std::vector<Group> & groups, ParseReport & report)
{
  if (!j.is_object() || !j.contains("tools") || !j.at("tools").is_array()) {
    return false;
  }
  for (const auto & t : j.at("tools")) {
    Group g;
    if (t.is_object() && t.contains("urdf") && t.at("urdf").is_string()) {
      g.tool_text = t.at("urdf").get<std::string>();
    } else {
      report.add("invalid_tool", "tool entry without a urdf string");
      continue;
    }
    if (t.contains("actions")) {
      if (auto plans = plans_from_json(t.at("actions"))) {
        g.plans = *plans;
      } else {
        report.add("unreadable_block", "tool entry has unreadable actions");
      }
    }
    groups.push_back(std::move(g));
  }
  return true;
}

std::vector<ActionPlan> build_plans(
  const std::vector<RawPlan> & raw, const ParseExpectation & expected, std::size_t tool_index, ParseReport & report)
{
  std::vector<ActionPlan> plans;
  std::size_t extra = 0;
  for (std::size_t p = 0; p < raw.size(); ++p) {
    ++report.plans_found;
    const std::string where = "tool " + std::to_string(tool_index) + " plan " + std::to_string(p);
    const RawPlan & rows = raw[p];
    if (rows.empty()) {
      report.add("empty_plan", where + " has no waypoints");
      continue;
    }
    auto bad = std::find_if(rows.begin(), rows.end(), [&](const auto & r) { return r.size() != expected.row_width; });
    if (bad != rows.end()) {
      report.add(
        "row_width", where + " row " + std::to_string(bad - rows.begin()) + " has " + std::to_string(bad->size()) +
                       " numbers, expected " + std::to_string(expected.row_width));
      continue;
    }
    if (plans.size() == static_cast<std::size_t>(expected.n_action)) {
      ++extra;
      continue;
    }
    try {
      plans.push_back(ActionPlan::from_rows(rows));
    } catch (const InvalidPlan & e) {
      report.add("invalid_plan", where + ": " + e.what());
    }
  }
  if (extra > 0) {
    report.add("extra_plans", "tool " + std::to_string(tool_index) + ": dropped " + std::to_string(extra));
  }
  if (plans.size() < static_cast<std::size_t>(expected.n_action)) {
    report.add(
      "missing_plans", "tool " + std::to_string(tool_index) + ": got " + std::to_string(plans.size()) + " of " +
                         std::to_string(expected.n_action));
  }
  return plans;
}

}  // namespace

bool ParseReport::has(const std::string & kind) const
{
  return count(kind) > 0;
}

std::size_t ParseReport::count(const std::string & kind) const
{
  return static_cast<std::size_t>(
    std::count_if(entries.begin(), entries.end(), [&](const ReportEntry & e) { return e.kind == kind; }));
}

std::size_t ParseResult::candidate_count() const
{
  std::size_t n = 0;
  for (const auto & b : bundles) {
    n += b.plans.size();
  }
  return n;
}

ParseExpectation expectation_for(const PromptBundle & bundle)
{
  ParseExpectation e;
  e.n_tool = bundle.n_tool;
  e.n_action = bundle.n_action;
  e.row_width = bundle.row_width();
  e.expects_tools = bundle.expects_tools();
  if (bundle.fixed_tool) {
    e.fixed_tool = parse_tool_fragment(*bundle.fixed_tool);
  }
  return e;
}

std::vector<FencedBlock> fenced_blocks(const std::string & text)
{
  std::vector<FencedBlock> blocks;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find("```", pos);
    if (open == std::string::npos) {
      break;
    }
    std::size_t eol = text.find('\n', open + 3);
    if (eol == std::string::npos) {
      break;
    }
    FencedBlock b;
    b.lang = text.substr(open + 3, eol - open - 3);
    b.lang.erase(std::remove_if(b.lang.begin(), b.lang.end(), [](unsigned char c) { return std::isspace(c); }),
                 b.lang.end());
    const std::size_t close = text.find("```", eol + 1);
    if (close == std::string::npos) {
      b.body = text.substr(eol + 1);
      b.terminated = false;
      blocks.push_back(std::move(b));
      break;
    }
    b.body = text.substr(eol + 1, close - eol - 1);
    blocks.push_back(std::move(b));
    pos = close + 3;
  }
  return blocks;
}

std::optional<std::vector<std::vector<std::vector<double>>>> numeric_plans(const std::string & body)
{
  try {
    const auto j = nlohmann::json::parse(body);
    if (auto plans = plans_from_json(j)) {
      return plans;
    }
  } catch (const nlohmann::json::exception &) {
  }
  const auto segments = bracket_segments(to_json_arrays(body));
  if (segments.empty()) {
    return std::nullopt;
  }
  std::vector<RawPlan> plans;
  for (const auto & s : segments) {
    try {
      auto part = plans_from_json(nlohmann::json::parse(s));
      if (!part) {
        return std::nullopt;
      }
      plans.insert(plans.end(), part->begin(), part->end());
    } catch (const nlohmann::json::exception &) {
      return std::nullopt;
    }
  }
  return plans;
}

ParseResult parse_response(const std::string & raw_text, const ParseExpectation & expected)
{
  ParseResult result;
  ParseReport & report = result.report;
  if (blank(raw_text)) {
    report.add("empty_response", "no text");
  }

  std::vector<Group> groups;
  if (!expected.expects_tools) {
    groups.emplace_back();
  }
  auto add_plans = [&](std::vector<RawPlan> plans) {
    if (groups.empty()) {
      report.add("orphan_plans", "action block before any tool");
      return;
    }
    auto & dst = groups.back().plans;
    dst.insert(dst.end(), plans.begin(), plans.end());
  };

  const auto blocks = fenced_blocks(raw_text);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const FencedBlock & b = blocks[i];
    if (!b.terminated) {
      report.add("unterminated_block", "block " + std::to_string(i) + " has no closing fence");
    }
    if (blank(b.body)) {
      continue;
    }
    if (is_tool_block(b)) {
      if (expected.expects_tools) {
        groups.push_back(Group{b.body, {}});
      } else {
        report.add("unexpected_tool", "block " + std::to_string(i) + " ignored");
      }
      continue;
    }
    if (expected.expects_tools) {
      try {
        if (read_tools_object(nlohmann::json::parse(b.body), groups, report)) {
          continue;
        }
      } catch (const nlohmann::json::exception &) {
      }
    }
    if (auto plans = numeric_plans(b.body)) {
      add_plans(std::move(*plans));
    } else {
      report.add("unreadable_block", "block " + std::to_string(i) + " (" + b.lang + ") holds no waypoint arrays");
    }
  }

  if (blocks.empty() && !blank(raw_text)) {
    bool handled = false;
    try {
      const auto j = nlohmann::json::parse(raw_text);
      handled = expected.expects_tools && read_tools_object(j, groups, report);
      if (!handled && !expected.expects_tools) {
        if (auto plans = plans_from_json(j)) {
          add_plans(std::move(*plans));
          handled = true;
        }
      }
    } catch (const nlohmann::json::exception &) {
    }
    if (!handled) {
      report.add("no_blocks", "response has no fenced code blocks");
    }
  }

  if (expected.expects_tools) {
    std::size_t extra = 0;
    for (const auto & g : groups) {
      ++report.tools_found;
      if (result.bundles.size() == static_cast<std::size_t>(expected.n_tool)) {
        ++extra;
        continue;
      }
      DesignBundle bundle;
      bundle.tool_text = *g.tool_text;
      try {
        bundle.tool = parse_tool_fragment(bundle.tool_text);
      } catch (const ParseError & e) {
        report.add("invalid_tool", "tool " + std::to_string(report.tools_found - 1) + ": " + e.what());
        continue;
      } catch (const ValidationError & e) {
        report.add("invalid_tool", "tool " + std::to_string(report.tools_found - 1) + ": " + e.what());
        continue;
      }
      if (bundle.tool->links.empty()) {
        report.add("empty_tool", "tool " + std::to_string(report.tools_found - 1) + " has no links");
      }
      bundle.plans = build_plans(g.plans, expected, result.bundles.size(), report);
      result.bundles.push_back(std::move(bundle));
    }
    if (extra > 0) {
      report.add("extra_tools", "dropped " + std::to_string(extra));
    }
    if (result.bundles.size() < static_cast<std::size_t>(expected.n_tool)) {
      report.add(
        "missing_tools",
        "got " + std::to_string(result.bundles.size()) + " of " + std::to_string(expected.n_tool));
    }
  } else {
    DesignBundle bundle;
    if (expected.fixed_tool) {
      bundle.tool = expected.fixed_tool;
      bundle.tool_text = expected.fixed_tool->source_text.empty() ? serialize_tool_fragment(*expected.fixed_tool)
                                                                  : expected.fixed_tool->source_text;
    }
    bundle.plans = build_plans(groups.front().plans, expected, 0, report);
    result.bundles.push_back(std::move(bundle));
  }
  return result;
}

}  // namespace toolsmith
