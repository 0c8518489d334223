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

#include <filesystem>
#include <string>

#include "json.hpp"

#include "toolsmith/evolution.hpp"

namespace toolsmith
{

class ArchiveError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Lineage & l);
nlohmann::json to_json(const FitnessRecord & f);
nlohmann::json to_json(const DesignCandidate & c);
DesignCandidate candidate_from_json(const nlohmann::json & j);

/// `with_timings = false` gives the canonical form used for the digest.
nlohmann::json to_json(const RunArchive & a, bool with_timings = true);
RunArchive archive_from_json(const nlohmann::json & j);

/// SHA-256 of the canonical archive JSON.
std::string archive_digest(const RunArchive & a);

/// Writes archive.json, config.json, prompts/, responses/ and tools/ under `dir`.
void save_run(const RunArchive & a, const std::filesystem::path & dir);
RunArchive load_run(const std::filesystem::path & dir);

}  // namespace toolsmith
