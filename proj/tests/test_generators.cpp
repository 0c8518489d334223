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

#include <cstdlib>
#include <random>

#include "doctest.h"

#include "toolsmith/http_generator.hpp"
#include "toolsmith/mock_generator.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines _res.
#include "stub_server.hpp"

using namespace toolsmith;

namespace
{

EvolutionConfig small(int n_tool, int n_action)
{
  EvolutionConfig c;
  c.n_tool = n_tool;
  c.n_action = n_action;
  return c;
}

EliteDesign as_elite(const ToolDesign & t, const std::string & id, std::size_t width)
{
  std::mt19937_64 rng(std::hash<std::string>{}(id));
  EliteDesign e;
  e.id = id;
  e.urdf = serialize_tool_fragment(t);
  e.plan = random_plan(rng, width);
  e.reward = 0.5;
  return e;
}

}  // namespace

TEST_CASE("mock output depends only on seed, prompt and agent")
{
  const TaskSpec & t = get_task("BringCube");
  const PromptBundle b = compose_prompt(Mission::InitialSampling, t, small(3, 2));
  CHECK(mock_generate(4, b, 0) == mock_generate(4, b, 0));
  CHECK(mock_generate(4, b, 0) != mock_generate(4, b, 1));
  CHECK(mock_generate(4, b, 0) != mock_generate(5, b, 0));
  CHECK(MockGenerator(4).identity() != MockGenerator(5).identity());
  MockOptions planted;
  planted.planted = true;
  CHECK(MockGenerator(4, planted).identity() != MockGenerator(4).identity());
}

TEST_CASE("mock responses parse back into the requested counts")
{
  for (const auto & name : {"BringCube", "LiftBox", "TurkeyLegs"}) {
    const TaskSpec & t = get_task(name);
    for (bool gripper : {false, true}) {
      if (gripper && !t.gripper_allowed) {
        continue;
      }
      PromptOptions opts;
      opts.gripper = gripper;
      const PromptBundle b = compose_prompt(Mission::InitialSampling, t, small(2, 2), opts);
      for (int agent = 0; agent < 10; ++agent) {
        CAPTURE(agent);
        const ParseResult r = parse_response(mock_generate(7, b, agent), expectation_for(b));
        CHECK(r.candidate_count() == 4);
        CHECK(r.report.entries.empty());
        for (const auto & d : r.bundles) {
          REQUIRE(d.tool);
          CHECK(d.tool->uses_gripper() == gripper);
          for (const auto & p : d.plans) {
            CHECK(p.row_width() == b.row_width());
          }
        }
      }
    }
  }
  const TaskSpec & lift = get_task("LiftBox");
  const PromptBundle nt = compose_prompt(Mission::NoTool, lift, small(1, 3));
  const ParseResult r = parse_response(mock_generate(1, nt, 2), expectation_for(nt));
  CHECK(r.candidate_count() == 3);
  CHECK(r.report.entries.empty());
}

TEST_CASE("evolved tools are one edit from an elite or combine two")
{
  const TaskSpec & t = get_task("BringCube");
  std::mt19937_64 rng(11);
  int crossovers = 0;
  int edits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const ToolDesign a = random_tool(rng, false);
    const ToolDesign b = random_tool(rng, false);
    PromptOptions opts;
    opts.elites = {as_elite(a, "0-0-0-0", 6), as_elite(b, "0-1-0-0", 6)};
    const PromptBundle bundle = compose_prompt(Mission::Evolution, t, small(3, 1), opts);
    const ParseResult r = parse_response(mock_generate(trial, bundle, trial % 4), expectation_for(bundle));
    REQUIRE(r.bundles.size() == 3);
    for (const auto & d : r.bundles) {
      REQUIRE(d.tool);
      const bool edit = structural_diff(*d.tool, a) <= 1 || structural_diff(*d.tool, b) <= 1;
      const bool cross = combines(*d.tool, a, b) || combines(*d.tool, b, a);
      CHECK((edit || cross));
      edits += edit ? 1 : 0;
      crossovers += cross ? 1 : 0;
    }
  }
  CHECK(edits > 0);
  CHECK(crossovers > 0);
}

TEST_CASE("mutation makes exactly one change and stays valid")
{
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const bool gripper = i % 3 == 0;
    const ToolDesign parent = random_tool(rng, gripper);
    CHECK_NOTHROW(validate(parent));
    EditKind kind = EditKind::Add;
    const ToolDesign child = mutate(parent, rng, 20, &kind);
    CHECK_NOTHROW(validate(child));
    CHECK(structural_diff(parent, child) == 1);
    CHECK(child.uses_gripper() == parent.uses_gripper());
  }
  const ToolDesign a = random_tool(rng, false);
  const ToolDesign b = random_tool(rng, false);
  const ToolDesign c = crossover(a, b, rng);
  CHECK_NOTHROW(validate(c));
  CHECK(combines(c, a, b));
  CHECK(structural_diff(a, a) == 0);
}

TEST_CASE("planted design improves under evolution")
{
  const TaskSpec & t = get_task("BringCube");
  MockOptions o;
  o.planted = true;
  const MockGenerator gen(0, o);
  const PromptBundle first = compose_prompt(Mission::InitialSampling, t, small(2, 1));
  const ParseResult r0 = parse_response(gen.complete(first, 0).text, expectation_for(first));
  REQUIRE(r0.bundles.size() == 2);
  CHECK(approx_equal(*r0.bundles[0].tool, planted_tool(false)));

  PromptOptions opts;
  EliteDesign e;
  e.id = "0-0-0-0";
  e.urdf = serialize_tool_fragment(planted_tool(false));
  e.plan = planted_plan();
  opts.elites = {e};
  const PromptBundle evo = compose_prompt(Mission::Evolution, t, small(2, 1), opts);
  const ParseResult r1 = parse_response(gen.complete(evo, 0).text, expectation_for(evo));
  REQUIRE_FALSE(r1.bundles.empty());
  CHECK(approx_equal(*r1.bundles[0].tool, planted_tool(true)));
  CHECK(structural_diff(planted_tool(false), planted_tool(true)) == 1);
}

TEST_CASE("http settings")
{
  CHECK(split_url("http://h:8/v1/x").scheme_host_port == "http://h:8");
  CHECK(split_url("http://h:8/v1/x").path == "/v1/x");
  CHECK(split_url("https://h").path == "/");
  CHECK_THROWS_AS(split_url("ftp://h"), std::invalid_argument);
  CHECK_THROWS_AS(http_config_from_json(nlohmann::json{{"bogus", 1}}), std::invalid_argument);
  const HttpConfig c = http_config_from_json(nlohmann::json{{"model", "m"}, {"temperature", 0.2}});
  CHECK(c.model == "m");
  CHECK(*c.temperature == 0.2);
  CHECK_THROWS_AS(HttpGenerator(HttpConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(read_completion(nlohmann::json{{"choices", nlohmann::json::array()}}), GeneratorError);
  PromptBundle b = compose_prompt(Mission::InitialSampling, get_task("BringCube"), small(1, 1));
  b.image = std::vector<std::uint8_t>{0x89, 'P', 'N', 'G'};
  const auto req = build_request(c, b);
  CHECK(req.at("messages").at(0).at("content").is_array());
  CHECK(req.at("messages").at(0).at("content").at(1).at("image_url").at("url").get<std::string>().rfind(
          "data:image/png;base64,", 0) == 0);
  CHECK(req.at("temperature") == 0.2);
}

TEST_CASE("http generator against a local endpoint")
{
  const TaskSpec & t = get_task("BringCube");
  const PromptBundle bundle = compose_prompt(Mission::InitialSampling, t, small(2, 2));
  testing::StubServer stub(
    [&bundle](const nlohmann::json & req) {
      CHECK(req.at("messages").at(0).at("content").get<std::string>() == bundle.text());
      return mock_generate(9, bundle, 0);
    },
    1);
  HttpConfig cfg;
  cfg.url = stub.url();
  cfg.model = "stub";
  cfg.api_key_env = "TOOLSMITH_TEST_KEY";
  cfg.retries = 2;
  cfg.timeout_s = 5;
  setenv("TOOLSMITH_TEST_KEY", "sekrit", 1);
  const HttpGenerator gen(cfg);
  const Completion c = gen.complete(bundle, 0);
  CHECK(stub.requests() == 2);
  CHECK(stub.last_auth() == "Bearer sekrit");
  CHECK(c.text == mock_generate(9, bundle, 0));
  CHECK(c.usage.prompt_tokens == 11);
  CHECK(parse_response(c.text, expectation_for(bundle)).candidate_count() == 4);
  unsetenv("TOOLSMITH_TEST_KEY");

  cfg.retries = 0;
  testing::StubServer down([](const nlohmann::json &) { return std::string(); }, 5);
  cfg.url = down.url();
  CHECK_THROWS_AS(HttpGenerator(cfg).complete(bundle, 0), GeneratorError);
}
