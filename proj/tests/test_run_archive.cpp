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

#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "toolsmith/mock_generator.hpp"
#include "toolsmith/run_archive.hpp"

using namespace toolsmith;

namespace
{

RunArchive small_run()
{
  MockOptions o;
  o.planted = true;
  static const MockGenerator gen(1, o);
  DesignClient client;
  client.generator = &gen;
  EvolutionConfig c = default_config("BringCube");
  c.n_agent = 2;
  c.n_tool = 2;
  c.n_action = 2;
  c.k_top = 2;
  c.n_iteration = 2;
  return run(get_task("BringCube"), c, client, BuiltinBackend());
}

std::filesystem::path fresh_dir(const std::string & name)
{
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("candidates round trip through JSON")
{
  const RunArchive a = small_run();
  for (const auto & it : a.iterations) {
    for (const auto & c : it.candidates) {
      const DesignCandidate back = candidate_from_json(to_json(c));
      CHECK(back.id == c.id);
      CHECK(approx_equal(back.tool, c.tool));
      CHECK(back.plan.to_rows() == c.plan.to_rows());
      CHECK(back.lineage.parents == c.lineage.parents);
      REQUIRE(back.fitness);
      CHECK(back.fitness->reward == c.fitness->reward);
      CHECK(back.fitness->diagnostics == c.fitness->diagnostics);
    }
  }
}

TEST_CASE("archive JSON keeps the digest")
{
  const RunArchive a = small_run();
  const RunArchive b = archive_from_json(nlohmann::json::parse(to_json(a).dump()));
  CHECK(archive_digest(a) == archive_digest(b));
  CHECK(b.best_so_far == a.best_so_far);
  CHECK(b.best->id == a.best->id);
  CHECK(a.find(a.best->id) != nullptr);
  CHECK(a.find("nope") == nullptr);
  // Wall-clock timings stay out of the canonical form.
  CHECK_FALSE(to_json(a, false).dump().find("seconds") != std::string::npos);
}

TEST_CASE("run directory layout and tamper check")
{
  const RunArchive a = small_run();
  const auto dir = fresh_dir("toolsmith_archive_test");
  save_run(a, dir);
  CHECK(std::filesystem::exists(dir / "archive.json"));
  CHECK(std::filesystem::exists(dir / "config.json"));
  CHECK(std::filesystem::exists(dir / "responses" / "i0-a0.txt"));
  CHECK(std::filesystem::exists(dir / "responses" / "i1-a1.txt"));
  CHECK_FALSE(std::filesystem::is_empty(dir / "prompts"));
  CHECK_FALSE(std::filesystem::is_empty(dir / "tools"));
  const RunArchive back = load_run(dir);
  CHECK(archive_digest(back) == archive_digest(a));

  // Raw responses are stored verbatim.
  std::ifstream in(dir / "responses" / "i0-a0.txt", std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == a.iterations[0].responses[0].raw_text);

  nlohmann::json j;
  {
    std::ifstream f(dir / "archive.json");
    j = nlohmann::json::parse(f);
  }
  j["best_so_far"][0] = 0.123;
  {
    std::ofstream f(dir / "archive.json");
    f << j.dump();
  }
  CHECK_THROWS_AS(load_run(dir), ArchiveError);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_run(dir), ArchiveError);
}
