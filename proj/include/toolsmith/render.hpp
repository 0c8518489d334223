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
#include <string>
#include <vector>

#include "toolsmith/sim.hpp"

namespace toolsmith
{

struct Raster
{
  int width = 0;
  int height = 0;
  /// Row-major RGB, top row first.
  std::vector<std::uint8_t> rgb;
};

struct RenderOptions
{
  int width = 256;
  int height = 256;
  double x_min = -0.2;
  double x_max = 1.3;
  double y_min = -0.75;
  double y_max = 0.75;
};

/// Flat-shaded view from above; the tool (if any) is drawn at the scene's
/// end-effector pose.
Raster render_top_view(const SceneState & scene, const RobotDescription * robot = nullptr,
                       const RenderOptions & options = {});

std::vector<std::uint8_t> encode_png(const Raster & raster);
std::string base64_encode(const std::vector<std::uint8_t> & bytes);

}  // namespace toolsmith
