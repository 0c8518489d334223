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

#include "toolsmith/render.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace toolsmith
{
namespace
{

using Rgb = std::array<std::uint8_t, 3>;

struct Item
{
  Primitive shape;
  Rgb color;
};

Rgb to_rgb(const std::array<double, 4> & c)
{
  auto channel = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  return {channel(c[0]), channel(c[1]), channel(c[2])};
}

// Height of the topmost surface of `p` along the vertical through (x, y).
std::optional<double> top_at(const Primitive & p, double x, double y)
{
  constexpr double kSky = 10.0;
  const Vec3 origin(x, y, kSky);
  if (const auto * box = std::get_if<OrientedBox>(&p)) {
    const auto t = ray_hit(*box, origin, -Vec3::UnitZ());
    if (!t) {
      return std::nullopt;
    }
    return kSky - *t;
  }
  const auto & ball = std::get<Ball>(p);
  const double dx = x - ball.center.x();
  const double dy = y - ball.center.y();
  const double r2 = ball.radius * ball.radius - dx * dx - dy * dy;
  if (r2 < 0.0) {
    return std::nullopt;
  }
  return ball.center.z() + std::sqrt(r2);
}

void put_u32(std::vector<std::uint8_t> & out, std::uint32_t v)
{
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_chunk(std::vector<std::uint8_t> & out, const char * type, const std::vector<std::uint8_t> & data)
{
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::vector<std::uint8_t> body(type, type + 4);
  body.insert(body.end(), data.begin(), data.end());
  out.insert(out.end(), body.begin(), body.end());
  put_u32(out, static_cast<std::uint32_t>(crc32(0L, body.data(), static_cast<uInt>(body.size()))));
}

}  // namespace

Raster render_top_view(const SceneState & scene, const RobotDescription * robot, const RenderOptions & options)
{
  std::vector<Item> items;
  const Rgb movable_default{200, 120, 40};
  const Rgb fixed_default{150, 150, 150};
  for (const auto & [id, o] : scene.objects) {
    const Rgb color = o.color ? to_rgb(*o.color) : (o.movable ? movable_default : fixed_default);
    for (const auto & p : o.primitives()) {
      items.push_back({p, color});
    }
  }
  if (robot != nullptr) {
    for (const auto & b : ToolGeometry::from_robot(*robot).at(scene.ee_pose)) {
      items.push_back({b, Rgb{40, 60, 160}});
    }
  }

  Raster r;
  r.width = options.width;
  r.height = options.height;
  r.rgb.assign(static_cast<std::size_t>(r.width * r.height * 3), 235);
  for (int row = 0; row < r.height; ++row) {
    // Image up is world +x, image right is world -y.
    const double x = options.x_max - (row + 0.5) * (options.x_max - options.x_min) / r.height;
    for (int col = 0; col < r.width; ++col) {
      const double y = options.y_max - (col + 0.5) * (options.y_max - options.y_min) / r.width;
      double best = -std::numeric_limits<double>::infinity();
      const Rgb * color = nullptr;
      for (const auto & item : items) {
        const auto h = top_at(item.shape, x, y);
        if (h && *h > best) {
          best = *h;
          color = &item.color;
        }
      }
      if (color != nullptr) {
        std::copy(color->begin(), color->end(), r.rgb.begin() + (row * r.width + col) * 3);
      }
    }
  }
  return r;
}

std::vector<std::uint8_t> encode_png(const Raster & raster)
{
  if (raster.width <= 0 || raster.height <= 0 ||
      raster.rgb.size() != static_cast<std::size_t>(raster.width * raster.height * 3))
  {
    throw std::invalid_argument("raster size does not match its pixel buffer");
  }
  std::vector<std::uint8_t> scanlines;
  scanlines.reserve(raster.rgb.size() + raster.height);
  for (int row = 0; row < raster.height; ++row) {
    scanlines.push_back(0);
    const auto begin = raster.rgb.begin() + row * raster.width * 3;
    scanlines.insert(scanlines.end(), begin, begin + raster.width * 3);
  }
  uLongf packed_size = compressBound(static_cast<uLong>(scanlines.size()));
  std::vector<std::uint8_t> packed(packed_size);
  if (compress2(packed.data(), &packed_size, scanlines.data(), static_cast<uLong>(scanlines.size()), 9) != Z_OK) {
    throw std::runtime_error("zlib compression failed");
  }
  packed.resize(packed_size);

  std::vector<std::uint8_t> png{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> header;
  put_u32(header, static_cast<std::uint32_t>(raster.width));
  put_u32(header, static_cast<std::uint32_t>(raster.height));
  header.insert(header.end(), {8, 2, 0, 0, 0});
  put_chunk(png, "IHDR", header);
  put_chunk(png, "IDAT", packed);
  put_chunk(png, "IEND", {});
  return png;
}

std::string base64_encode(const std::vector<std::uint8_t> & bytes)
{
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(
    reinterpret_cast<unsigned char *>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace toolsmith
