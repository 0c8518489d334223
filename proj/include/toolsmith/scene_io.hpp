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
#include <ostream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "toolsmith/sim.hpp"

namespace toolsmith
{

class SceneFormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

nlohmann::json pose_to_json(const Pose & p);
/// Accepts {"xyz", "quat" [w, x, y, z]} or {"xyz", "rpy"}.
Pose pose_from_json(const nlohmann::json & j);

nlohmann::json to_json(const SceneObject & o);
SceneObject object_from_json(const nlohmann::json & j);

/// Poses are written as quaternions so save/load is lossless.
nlohmann::json to_json(const SceneState & s);
SceneState scene_from_json(const nlohmann::json & j);

SceneState load_scene(const std::filesystem::path & path);
void save_scene(const SceneState & s, const std::filesystem::path & path);

/// One compact JSON object per line.
void write_state_log(std::ostream & os, const std::vector<SceneState> & log);
std::vector<SceneState> read_state_log(std::istream & is);

nlohmann::json to_json(const Diagnostic & d);
Diagnostic diagnostic_from_json(const nlohmann::json & j);

}  // namespace toolsmith
