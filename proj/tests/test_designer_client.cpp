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

#include <atomic>
#include <chrono>
#include <mutex>
#include <set>
#include <thread>

#include "doctest.h"

#include "toolsmith/designer_client.hpp"
#include "toolsmith/mock_generator.hpp"

using namespace toolsmith;

namespace
{

EvolutionConfig cfg(int n_agent)
{
  EvolutionConfig c;
  c.n_agent = n_agent;
  c.n_tool = 2;
  c.n_action = 2;
  return c;
}

// Records who called and from which thread; agents in `fail` throw.
class Recording : public GeneratorBackend
{
public:
  explicit Recording(std::set<int> fail = {}) : fail_(std::move(fail)) {}

  std::string identity() const override { return "recording"; }
  Completion complete(const PromptBundle & bundle, int agent_id) const override
  {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      threads_.insert(std::this_thread::get_id());
      agents_.insert(agent_id);
    }
    const int now = ++in_flight_;
    int seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --in_flight_;
    if (fail_.count(agent_id)) {
      throw GeneratorError("agent " + std::to_string(agent_id) + " unavailable");
    }
    return {mock_generate(1, bundle, agent_id), {}};
  }

  std::set<int> agents() const { return agents_; }
  std::size_t thread_count() const { return threads_.size(); }
  int peak() const { return peak_; }

private:
  std::set<int> fail_;
  mutable std::mutex mutex_;
  mutable std::set<std::thread::id> threads_;
  mutable std::set<int> agents_;
  mutable std::atomic<int> in_flight_{0};
  mutable std::atomic<int> peak_{0};
};

}  // namespace

TEST_CASE("agents run concurrently and independently")
{
  const TaskSpec & t = get_task("BringCube");
  const PromptBundle b = compose_prompt(Mission::InitialSampling, t, cfg(3));
  const Recording backend;
  const auto responses = fan_out(backend, b, 3);
  REQUIRE(responses.size() == 3);
  CHECK(backend.agents() == std::set<int>{0, 1, 2});
  CHECK(backend.thread_count() == 3);
  CHECK(backend.peak() >= 2);
  std::set<std::string> texts;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    CHECK(responses[i].agent_id == static_cast<int>(i));
    CHECK(responses[i].prompt_hash == b.hash());
    CHECK(responses[i].candidate_count() == 4);
    CHECK_FALSE(responses[i].error);
    texts.insert(responses[i].raw_text);
  }
  CHECK(texts.size() == 3);
}

TEST_CASE("a single agent works and bad counts are rejected")
{
  const PromptBundle b = compose_prompt(Mission::InitialSampling, get_task("BringCube"), cfg(1));
  const auto r = fan_out(MockGenerator(2), b, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0].candidate_count() == 4);
  CHECK_THROWS_AS(fan_out(MockGenerator(2), b, 0), std::invalid_argument);
  CHECK_THROWS_AS(fan_out(MockGenerator(2), std::vector<PromptBundle>{}), std::invalid_argument);
}

TEST_CASE("agent failures are isolated until all fail")
{
  const PromptBundle b = compose_prompt(Mission::InitialSampling, get_task("BringCube"), cfg(3));
  const auto some = fan_out(Recording({1}), b, 3);
  CHECK_FALSE(some[0].error);
  REQUIRE(some[1].error);
  CHECK(some[1].report.has("agent_error"));
  CHECK(some[1].parsed.empty());
  CHECK(some[2].candidate_count() == 4);
  CHECK(to_json(some[1]).contains("error"));

  try {
    fan_out(Recording({0, 1, 2}), b, 3);
    FAIL("expected AllAgentsFailed");
  } catch (const AllAgentsFailed & e) {
    CHECK(e.errors().size() == 3);
  }
}

TEST_CASE("gripper share splits the agents")
{
  const TaskSpec & lift = get_task("LiftBox");
  const auto half = agent_bundles(Mission::InitialSampling, lift, cfg(6), {});
  REQUIRE(half.size() == 6);
  int fingers = 0;
  for (std::size_t i = 0; i < half.size(); ++i) {
    fingers += half[i].gripper ? 1 : 0;
    CHECK(half[i].gripper == (i % 2 == 1));
  }
  CHECK(fingers == 3);

  const auto odd = agent_bundles(Mission::InitialSampling, lift, cfg(5), {});
  int n = 0;
  for (const auto & b : odd) {
    n += b.gripper ? 1 : 0;
  }
  CHECK(n == 2);

  const auto all = agent_bundles(Mission::InitialSampling, lift, cfg(4), {}, 1.0);
  for (const auto & b : all) {
    CHECK(b.gripper);
  }
  for (const auto & b : agent_bundles(Mission::InitialSampling, get_task("BringCube"), cfg(4), {})) {
    CHECK_FALSE(b.gripper);
  }
  for (const auto & b : agent_bundles(Mission::NoTool, lift, cfg(4), {})) {
    CHECK(b.gripper);
    CHECK(b.mission == Mission::NoTool);
  }
}
