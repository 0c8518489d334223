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

#include "toolsmith/run_archive.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "toolsmith/digest.hpp"
#include "toolsmith/scene_io.hpp"

namespace toolsmith
{
namespace
{

using json = nlohmann::json;

void write_text(const std::filesystem::path & p, const std::string & text)
{
  std::ofstream out(p, std::ios::binary);
  if (!out) {
    throw ArchiveError("cannot write " + p.string());
  }
  out << text;
}

std::string read_text(const std::filesystem::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw ArchiveError("cannot read " + p.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json response_json(const DesignResponse & r)
{
  json j = to_json(r);
  j["raw_text"] = r.raw_text;
  return j;
}

DesignResponse response_from_json(const json & j)
{
  DesignResponse r;
  r.agent_id = j.at("agent_id").get<int>();
  r.prompt_hash = j.value("prompt_hash", "");
  r.raw_text = j.value("raw_text", "");
  if (j.contains("error")) {
    r.error = j.at("error").get<std::string>();
  }
  for (const auto & e : j.value("report", json::array())) {
    r.report.add(e.at("kind").get<std::string>(), e.at("detail").get<std::string>());
  }
  r.report.tools_found = j.value("tools_found", std::size_t{0});
  r.report.plans_found = j.value("plans_found", std::size_t{0});
  if (j.contains("usage")) {
    r.usage.prompt_tokens = j.at("usage").value("prompt_tokens", 0L);
    r.usage.completion_tokens = j.at("usage").value("completion_tokens", 0L);
  }
  return r;
}

}  // namespace

json to_json(const Lineage & l)
{
  return {{"iteration", l.iteration}, {"agent_id", l.agent_id}, {"tool_index", l.tool_index},
          {"plan_index", l.plan_index}, {"parents", l.parents}};
}

json to_json(const FitnessRecord & f)
{
  json diags = json::array();
  for (const auto & d : f.diagnostics) {
    diags.push_back(to_json(d));
  }
  json j{{"reward", f.reward}, {"distance", f.distance}, {"rollout_seed", f.rollout_seed}, {"diagnostics", diags}};
  if (f.error) {
    j["error"] = *f.error;
  }
  return j;
}

json to_json(const DesignCandidate & c)
{
  json j{{"id", c.id}, {"tool", serialize_tool_fragment(c.tool)}, {"plan", c.plan.to_json()},
         {"lineage", to_json(c.lineage)}};
  if (c.fitness) {
    j["fitness"] = to_json(*c.fitness);
  }
  return j;
}

DesignCandidate candidate_from_json(const json & j)
{
  try {
    DesignCandidate c;
    c.id = j.at("id").get<std::string>();
    c.tool = parse_tool_fragment(j.at("tool").get<std::string>());
    c.plan = ActionPlan::from_json(j.at("plan"));
    const json & l = j.at("lineage");
    c.lineage = Lineage{l.at("iteration").get<int>(), l.at("agent_id").get<int>(), l.at("tool_index").get<int>(),
                        l.at("plan_index").get<int>(), l.at("parents").get<std::vector<std::string>>()};
    if (j.contains("fitness")) {
      const json & f = j.at("fitness");
      FitnessRecord r;
      r.reward = f.at("reward").get<double>();
      r.distance = f.at("distance").get<double>();
      r.rollout_seed = f.at("rollout_seed").get<std::uint64_t>();
      for (const auto & d : f.at("diagnostics")) {
        r.diagnostics.push_back(diagnostic_from_json(d));
      }
      if (f.contains("error")) {
        r.error = f.at("error").get<std::string>();
      }
      c.fitness = r;
    }
    return c;
  } catch (const json::exception & e) {
    throw ArchiveError(std::string("bad candidate record: ") + e.what());
  }
}

json to_json(const RunArchive & a, bool with_timings)
{
  json iterations = json::array();
  for (const auto & it : a.iterations) {
    json candidates = json::array();
    for (const auto & c : it.candidates) {
      candidates.push_back(to_json(c));
    }
    json responses = json::array();
    for (const auto & r : it.responses) {
      json rj = response_json(r);
      if (!with_timings) {
        rj["usage"].erase("seconds");
      } else {
        rj["usage"]["seconds"] = r.usage.seconds;
      }
      responses.push_back(rj);
    }
    json ij{{"iteration", it.iteration}, {"mission", to_string(it.mission)}, {"restart", it.restart},
            {"prompt_hashes", it.prompt_hashes}, {"responses", responses}, {"candidates", candidates},
            {"elite_ids", it.elite_ids}};
    if (it.error) {
      ij["error"] = *it.error;
    }
    if (with_timings) {
      ij["seconds"] = it.seconds;
    }
    iterations.push_back(ij);
  }
  json j{
    {"task", a.task},
    {"config", to_json(a.config)},
    {"reward_constants", to_json(a.constants)},
    {"seed", a.seed},
    {"generator", a.generator},
    {"backend", a.backend},
    {"iterations", iterations},
    {"best_so_far", a.best_so_far},
    {"prompts", a.prompts},
  };
  if (a.best) {
    j["best"] = a.best->id;
  }
  return j;
}

RunArchive archive_from_json(const json & j)
{
  try {
    RunArchive a;
    a.task = j.at("task").get<std::string>();
    a.config = apply_overrides(EvolutionConfig{}, j.at("config"));
    a.constants = apply_overrides(RewardConstants{}, j.at("reward_constants"));
    a.seed = j.at("seed").get<std::uint64_t>();
    a.generator = j.at("generator").get<std::string>();
    a.backend = j.at("backend").get<std::string>();
    for (const auto & ij : j.at("iterations")) {
      IterationRecord it;
      it.iteration = ij.at("iteration").get<int>();
      it.mission = mission_from_string(ij.at("mission").get<std::string>());
      it.restart = ij.at("restart").get<bool>();
      it.prompt_hashes = ij.at("prompt_hashes").get<std::vector<std::string>>();
      for (const auto & r : ij.at("responses")) {
        it.responses.push_back(response_from_json(r));
        if (r.contains("usage")) {
          it.responses.back().usage.seconds = r.at("usage").value("seconds", 0.0);
        }
      }
      for (const auto & c : ij.at("candidates")) {
        it.candidates.push_back(candidate_from_json(c));
      }
      it.elite_ids = ij.at("elite_ids").get<std::vector<std::string>>();
      if (ij.contains("error")) {
        it.error = ij.at("error").get<std::string>();
      }
      it.seconds = ij.value("seconds", 0.0);
      a.iterations.push_back(std::move(it));
    }
    a.best_so_far = j.at("best_so_far").get<std::vector<double>>();
    a.prompts = j.value("prompts", std::map<std::string, std::string>{});
    if (j.contains("best")) {
      const DesignCandidate * c = a.find(j.at("best").get<std::string>());
      if (c == nullptr) {
        throw ArchiveError("best candidate is not in the archive");
      }
      a.best = *c;
    }
    return a;
  } catch (const json::exception & e) {
    throw ArchiveError(std::string("bad archive: ") + e.what());
  } catch (const ConfigError & e) {
    throw ArchiveError(std::string("bad archive config: ") + e.what());
  }
}

std::string archive_digest(const RunArchive & a)
{
  return sha256_hex(to_json(a, false).dump());
}

void save_run(const RunArchive & a, const std::filesystem::path & dir)
{
  namespace fs = std::filesystem;
  fs::create_directories(dir / "responses");
  fs::create_directories(dir / "tools");
  fs::create_directories(dir / "prompts");
  json archive = to_json(a);
  archive["digest"] = archive_digest(a);
  write_text(dir / "archive.json", archive.dump(2) + "\n");
  write_text(
    dir / "config.json",
    json{{"task", a.task}, {"config", to_json(a.config)}, {"reward_constants", to_json(a.constants)}}.dump(2) + "\n");
  for (const auto & [hash, text] : a.prompts) {
    write_text(dir / "prompts" / (hash + ".txt"), text);
  }
  for (const auto & it : a.iterations) {
    for (const auto & r : it.responses) {
      write_text(
        dir / "responses" / ("i" + std::to_string(it.iteration) + "-a" + std::to_string(r.agent_id) + ".txt"),
        r.raw_text);
    }
    std::set<std::string> written;
    for (const auto & c : it.candidates) {
      const std::string stem = c.id.substr(0, c.id.rfind("-p"));
      if (written.insert(stem).second && !c.tool.links.empty()) {
        write_text(dir / "tools" / (stem + ".urdf.frag"), serialize_tool_fragment(c.tool));
      }
    }
  }
}

RunArchive load_run(const std::filesystem::path & dir)
{
  const auto path = std::filesystem::is_directory(dir) ? dir / "archive.json" : dir;
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception & e) {
    throw ArchiveError(path.string() + ": " + e.what());
  }
  RunArchive a = archive_from_json(j);
  if (j.contains("digest") && j.at("digest").get<std::string>() != archive_digest(a)) {
    throw ArchiveError(path.string() + ": digest does not match the archive contents");
  }
  return a;
}

}  // namespace toolsmith
