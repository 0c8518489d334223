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

#include "toolsmith/scene_io.hpp"

#include <fstream>
#include <string>

namespace toolsmith
{
namespace
{

using nlohmann::json;

json vec_json(const Vec3 & v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json & j, const char * what)
{
  if (!j.is_array() || j.size() != 3) {
    throw SceneFormatError(std::string(what) + " must be an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json shape_json(const Shape & shape)
{
  if (const auto * b = std::get_if<BoxShape>(&shape)) {
    return {{"type", "box"}, {"half_extents", vec_json(b->half_extents)}};
  }
  if (const auto * s = std::get_if<SphereShape>(&shape)) {
    return {{"type", "sphere"}, {"radius", s->radius}};
  }
  json parts = json::array();
  for (const auto & p : std::get<CompositeShape>(shape).parts) {
    parts.push_back({{"offset", pose_to_json(p.offset)}, {"half_extents", vec_json(p.half_extents)}});
  }
  return {{"type", "composite"}, {"parts", parts}};
}

Shape shape_from(const json & j)
{
  const std::string type = j.at("type").get<std::string>();
  if (type == "box") {
    return BoxShape{vec_from(j.at("half_extents"), "half_extents")};
  }
  if (type == "sphere") {
    return SphereShape{j.at("radius").get<double>()};
  }
  if (type == "composite") {
    CompositeShape c;
    for (const auto & p : j.at("parts")) {
      BoxPart part;
      if (p.contains("offset")) {
        part.offset = pose_from_json(p.at("offset"));
      }
      part.half_extents = vec_from(p.at("half_extents"), "half_extents");
      c.parts.push_back(part);
    }
    return c;
  }
  throw SceneFormatError("unknown shape type '" + type + "'");
}

}  // namespace

json pose_to_json(const Pose & p)
{
  const Quat & q = p.orientation;
  return {{"xyz", vec_json(p.position)}, {"quat", json::array({q.w(), q.x(), q.y(), q.z()})}};
}

Pose pose_from_json(const json & j)
{
  Pose p;
  if (j.contains("xyz")) {
    p.position = vec_from(j.at("xyz"), "xyz");
  }
  if (j.contains("quat")) {
    const auto & q = j.at("quat");
    if (!q.is_array() || q.size() != 4) {
      throw SceneFormatError("quat must be [w, x, y, z]");
    }
    p.orientation = Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
  } else if (j.contains("rpy")) {
    p.orientation = euler_to_quaternion(vec_from(j.at("rpy"), "rpy"));
  }
  return p;
}

json to_json(const SceneObject & o)
{
  json j{{"id", o.id},           {"shape", shape_json(o.shape)}, {"pose", pose_to_json(o.pose)},
         {"movable", o.movable}, {"collidable", o.collidable},   {"held_speed", o.held_speed}};
  if (o.color) {
    j["color"] = *o.color;
  }
  return j;
}

SceneObject object_from_json(const json & j)
{
  try {
    SceneObject o;
    o.id = j.at("id").get<std::string>();
    o.shape = shape_from(j.at("shape"));
    if (j.contains("pose")) {
      o.pose = pose_from_json(j.at("pose"));
    }
    o.movable = j.value("movable", false);
    o.collidable = j.value("collidable", true);
    o.held_speed = j.value("held_speed", 0.0);
    if (j.contains("color")) {
      o.color = j.at("color").get<std::array<double, 4>>();
    }
    return o;
  } catch (const json::exception & e) {
    throw SceneFormatError(std::string("bad scene object: ") + e.what());
  }
}

json to_json(const SceneState & s)
{
  json objects = json::array();
  for (const auto & [id, o] : s.objects) {
    objects.push_back(to_json(o));
  }
  return {{"objects", objects},           {"ee_pose", pose_to_json(s.ee_pose)},
          {"gripper_open", s.gripper_open}, {"step_index", s.step_index},
          {"grasped", s.grasped}};
}

SceneState scene_from_json(const json & j)
{
  SceneState s;
  try {
    for (const auto & o : j.at("objects")) {
      SceneObject obj = object_from_json(o);
      const std::string id = obj.id;
      if (!s.objects.emplace(id, std::move(obj)).second) {
        throw SceneFormatError("duplicate object id '" + id + "'");
      }
    }
    if (j.contains("ee_pose")) {
      s.ee_pose = pose_from_json(j.at("ee_pose"));
    }
    s.gripper_open = j.value("gripper_open", true);
    s.step_index = j.value("step_index", std::size_t{0});
    s.grasped = j.value("grasped", std::vector<std::string>{});
  } catch (const json::exception & e) {
    throw SceneFormatError(std::string("bad scene: ") + e.what());
  }
  return s;
}

SceneState load_scene(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw SceneFormatError("cannot open scene file " + path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error & e) {
    throw SceneFormatError(path.string() + ": " + e.what());
  }
  return scene_from_json(j);
}

void save_scene(const SceneState & s, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw SceneFormatError("cannot write scene file " + path.string());
  }
  out << to_json(s).dump(2) << '\n';
}

void write_state_log(std::ostream & os, const std::vector<SceneState> & log)
{
  for (const auto & s : log) {
    os << to_json(s).dump() << '\n';
  }
}

std::vector<SceneState> read_state_log(std::istream & is)
{
  std::vector<SceneState> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) {
      out.push_back(scene_from_json(json::parse(line)));
    }
  }
  return out;
}

json to_json(const Diagnostic & d)
{
  return {{"kind", d.kind},   {"object", d.object},        {"first_step", d.first_step},
          {"count", d.count}, {"max_value", d.max_value}};
}

Diagnostic diagnostic_from_json(const json & j)
{
  try {
    return Diagnostic{
      j.at("kind").get<std::string>(), j.at("object").get<std::string>(), j.at("first_step").get<std::size_t>(),
      j.at("count").get<std::size_t>(), j.at("max_value").get<double>()};
  } catch (const json::exception & e) {
    throw SceneFormatError(std::string("bad diagnostic: ") + e.what());
  }
}

}  // namespace toolsmith
