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

#include "toolsmith/urdf_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "toolsmith/xml_tree.hpp"

namespace toolsmith
{
namespace
{

const std::set<std::string> kBaseFrames = {
  "panda_link0", kVirtualFlange, kLeftFinger, kRightFinger};

bool is_attachment_frame(const std::string & name)
{
  return name == kVirtualFlange || name == kLeftFinger || name == kRightFinger;
}

std::string format_number(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_vec(const Vec3 & v)
{
  return format_number(v.x()) + " " + format_number(v.y()) + " " + format_number(v.z());
}

std::vector<double> parse_numbers(const std::string & text, std::size_t expected, int line)
{
  std::vector<double> out;
  std::istringstream is(text);
  std::string token;
  while (is >> token) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
      throw ParseError("line " + std::to_string(line) + ": bad number '" + token + "'");
    }
    out.push_back(v);
  }
  if (out.size() != expected) {
    throw ParseError(
      "line " + std::to_string(line) + ": expected " + std::to_string(expected) +
      " numbers, got '" + text + "'");
  }
  return out;
}

Vec3 parse_vec3(const std::string & text, int line)
{
  const auto v = parse_numbers(text, 3, line);
  return Vec3(v[0], v[1], v[2]);
}

Origin parse_origin(const xml::Element * e)
{
  Origin o;
  if (e == nullptr) {
    return o;
  }
  if (const auto xyz = e->attribute("xyz")) {
    o.xyz = parse_vec3(*xyz, e->line);
  }
  if (const auto rpy = e->attribute("rpy")) {
    o.rpy = parse_vec3(*rpy, e->line);
  }
  return o;
}

std::string escape(const std::string & s)
{
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string required_name(const xml::Element & e, const char * what)
{
  const auto name = e.attribute("name");
  if (!name || name->empty()) {
    throw ValidationError(
      Violation::Structure, std::string(what) + " at line " + std::to_string(e.line) + " has no name");
  }
  return *name;
}

Vec3 box_half_extents(const xml::Element & geometry, const std::string & link)
{
  const xml::Element * shape = nullptr;
  for (const auto & c : geometry.children) {
    if (shape != nullptr) {
      throw ValidationError(Violation::NonBox, "link '" + link + "' has more than one shape");
    }
    shape = &c;
  }
  if (shape == nullptr) {
    throw ValidationError(Violation::NonBox, "link '" + link + "' has an empty geometry");
  }
  if (shape->name != "box") {
    throw ValidationError(
      Violation::NonBox, "link '" + link + "' uses <" + shape->name + ">; only boxes are allowed");
  }
  const auto size = shape->attribute("size");
  if (!size) {
    throw ParseError("line " + std::to_string(shape->line) + ": <box> without size");
  }
  return parse_vec3(*size, shape->line) / 2.0;
}

std::optional<std::array<double, 4>> parse_rgba(const xml::Element * color)
{
  if (color == nullptr) {
    return std::nullopt;
  }
  const auto rgba = color->attribute("rgba");
  if (!rgba) {
    return std::nullopt;
  }
  const auto v = parse_numbers(*rgba, 4, color->line);
  return std::array<double, 4>{v[0], v[1], v[2], v[3]};
}

using MaterialTable = std::map<std::string, std::array<double, 4>>;

BoxLink parse_link(const xml::Element & e, const MaterialTable & materials, std::vector<std::string> & warnings)
{
  BoxLink link;
  link.name = required_name(e, "<link>");
  const auto visuals = e.children_named("visual");
  const auto collisions = e.children_named("collision");
  if (visuals.size() > 1) {
    warnings.push_back("link '" + link.name + "': extra <visual> elements ignored");
  }
  const xml::Element * primary = !visuals.empty() ? visuals.front()
                                 : !collisions.empty() ? collisions.front() : nullptr;
  if (primary == nullptr || primary->child("geometry") == nullptr) {
    throw ValidationError(Violation::NonBox, "link '" + link.name + "' has no box geometry");
  }
  link.half_extents = box_half_extents(*primary->child("geometry"), link.name);
  link.origin = parse_origin(primary->child("origin"));
  for (const auto * c : collisions) {
    if (const auto * g = c->child("geometry")) {
      box_half_extents(*g, link.name);
    }
  }
  if (!visuals.empty()) {
    if (const auto * material = visuals.front()->child("material")) {
      link.color = parse_rgba(material->child("color"));
      if (!link.color) {
        if (const auto ref = material->attribute("name")) {
          const auto it = materials.find(*ref);
          if (it != materials.end()) {
            link.color = it->second;
          }
        }
      }
    }
  }
  if (const auto * inertial = e.child("inertial")) {
    if (const auto * mass = inertial->child("mass")) {
      const auto value = mass->attribute("value");
      if (!value) {
        throw ParseError("line " + std::to_string(mass->line) + ": <mass> without value");
      }
      link.mass = parse_numbers(*value, 1, mass->line).front();
    }
  }
  return link;
}

FixedJoint parse_joint(const xml::Element & e)
{
  FixedJoint joint;
  joint.name = required_name(e, "<joint>");
  const auto type = e.attribute("type").value_or("");
  if (type != "fixed") {
    throw ValidationError(
      Violation::Structure, "joint '" + joint.name + "' has type '" + type + "'; only fixed joints are allowed");
  }
  const auto * parent = e.child("parent");
  const auto * child = e.child("child");
  if (parent == nullptr || child == nullptr || !parent->attribute("link") || !child->attribute("link")) {
    throw ValidationError(Violation::Structure, "joint '" + joint.name + "' needs parent and child links");
  }
  joint.parent = *parent->attribute("link");
  joint.child = *child->attribute("link");
  joint.origin = parse_origin(e.child("origin"));
  return joint;
}

Attachment derive_attachment(const ToolDesign & tool)
{
  GripperFingersAttachment fingers;
  bool flange = false;
  for (const auto & j : tool.joints) {
    if (j.parent == kVirtualFlange) {
      flange = true;
    } else if (j.parent == kLeftFinger) {
      fingers.left_roots.push_back(j.child);
    } else if (j.parent == kRightFinger) {
      fingers.right_roots.push_back(j.child);
    }
  }
  const bool uses_fingers = !fingers.left_roots.empty() || !fingers.right_roots.empty();
  if (flange && uses_fingers) {
    throw ValidationError(
      Violation::BadAttachment, "tool attaches to both the flange and the gripper fingers");
  }
  if (uses_fingers) {
    return fingers;
  }
  return VirtualFlangeAttachment{};
}

void collect(const std::vector<const xml::Element *> & elements, ToolDesign & tool)
{
  MaterialTable materials;
  for (const auto * e : elements) {
    if (e->name == "material") {
      if (const auto name = e->attribute("name")) {
        if (const auto rgba = parse_rgba(e->child("color"))) {
          materials[*name] = *rgba;
        }
      }
    }
  }
  for (const auto * e : elements) {
    if (e->name == "link") {
      tool.links.push_back(parse_link(*e, materials, tool.warnings));
    } else if (e->name == "joint") {
      tool.joints.push_back(parse_joint(*e));
    } else if (e->name != "material") {
      tool.warnings.push_back("ignored <" + e->name + "> at line " + std::to_string(e->line));
    }
  }
  tool.attachment = derive_attachment(tool);
}

std::string strip_declarations(const std::string & text)
{
  static const std::regex decl(R"(<\?xml[^>]*\?>|<!DOCTYPE[^>]*>)");
  return std::regex_replace(text, decl, "");
}

bool all_space(const std::string & s)
{
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

struct LinkFrame
{
  std::string attachment_frame;
  Pose pose;
};

// Link frames relative to their attachment frame. Assumes the joint graph has
// already been checked for cycles and orphans.
std::map<std::string, LinkFrame> link_frames(const ToolDesign & tool)
{
  std::map<std::string, const FixedJoint *> parent_of;
  for (const auto & j : tool.joints) {
    parent_of[j.child] = &j;
  }
  std::map<std::string, LinkFrame> frames;
  std::function<const LinkFrame &(const std::string &)> resolve =
    [&](const std::string & name) -> const LinkFrame & {
    if (const auto it = frames.find(name); it != frames.end()) {
      return it->second;
    }
    const FixedJoint * j = parent_of.at(name);
    LinkFrame f;
    if (is_attachment_frame(j->parent)) {
      f.attachment_frame = j->parent;
      f.pose = j->origin.to_pose();
    } else {
      const LinkFrame & up = resolve(j->parent);
      f.attachment_frame = up.attachment_frame;
      f.pose = up.pose * j->origin.to_pose();
    }
    return frames.emplace(name, f).first->second;
  };
  for (const auto & l : tool.links) {
    resolve(l.name);
  }
  return frames;
}

void write_origin(std::ostream & os, const Origin & o, const std::string & indent)
{
  os << indent << "<origin xyz=\"" << format_vec(o.xyz) << "\" rpy=\"" << format_vec(o.rpy) << "\"/>\n";
}

void write_box_geometry(std::ostream & os, const Vec3 & half, const std::string & indent)
{
  os << indent << "<geometry>\n"
     << indent << "  <box size=\"" << format_vec(2.0 * half) << "\"/>\n"
     << indent << "</geometry>\n";
}

void write_tool(std::ostream & os, const ToolDesign & tool, const std::string & indent)
{
  for (const auto & l : tool.links) {
    const std::string in1 = indent + "  ";
    const std::string in2 = in1 + "  ";
    os << indent << "<link name=\"" << escape(l.name) << "\">\n";
    os << in1 << "<visual>\n";
    write_origin(os, l.origin, in2);
    write_box_geometry(os, l.half_extents, in2);
    if (l.color) {
      const auto & c = *l.color;
      os << in2 << "<material name=\"" << escape(l.name) << "_material\">\n"
         << in2 << "  <color rgba=\"" << format_number(c[0]) << " " << format_number(c[1]) << " "
         << format_number(c[2]) << " " << format_number(c[3]) << "\"/>\n"
         << in2 << "</material>\n";
    }
    os << in1 << "</visual>\n";
    os << in1 << "<collision>\n";
    write_origin(os, l.origin, in2);
    write_box_geometry(os, l.half_extents, in2);
    os << in1 << "</collision>\n";
    const Vec3 s = 2.0 * l.half_extents;
    const double k = l.mass / 12.0;
    os << in1 << "<inertial>\n";
    write_origin(os, l.origin, in2);
    os << in2 << "<mass value=\"" << format_number(l.mass) << "\"/>\n";
    os << in2 << "<inertia ixx=\"" << format_number(k * (s.y() * s.y() + s.z() * s.z()))
       << "\" ixy=\"0\" ixz=\"0\" iyy=\"" << format_number(k * (s.x() * s.x() + s.z() * s.z()))
       << "\" iyz=\"0\" izz=\"" << format_number(k * (s.x() * s.x() + s.y() * s.y())) << "\"/>\n";
    os << in1 << "</inertial>\n";
    os << indent << "</link>\n";
  }
  for (const auto & j : tool.joints) {
    os << indent << "<joint name=\"" << escape(j.name) << "\" type=\"fixed\">\n";
    os << indent << "  <parent link=\"" << escape(j.parent) << "\"/>\n";
    os << indent << "  <child link=\"" << escape(j.child) << "\"/>\n";
    write_origin(os, j.origin, indent + "  ");
    os << indent << "</joint>\n";
  }
}

bool near(const Vec3 & a, const Vec3 & b, double tol)
{
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

bool near(const Origin & a, const Origin & b, double tol)
{
  return near(a.xyz, b.xyz, tol) && near(a.rpy, b.rpy, tol);
}

}  // namespace

const char * to_string(Violation v)
{
  switch (v) {
    case Violation::Mass: return "mass";
    case Violation::Gap: return "gap";
    case Violation::NonBox: return "non-box";
    case Violation::BadAttachment: return "bad-attachment";
    case Violation::Extents: return "extents";
    case Violation::Structure: return "structure";
    case Violation::DuplicateName: return "duplicate-name";
    case Violation::DuplicateTool: return "duplicate-tool";
  }
  return "unknown";
}

ValidationError::ValidationError(Violation kind, const std::string & what)
: std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

const BoxLink * ToolDesign::find_link(const std::string & name) const
{
  for (const auto & l : links) {
    if (l.name == name) {
      return &l;
    }
  }
  return nullptr;
}

const FixedJoint * ToolDesign::parent_joint(const std::string & link) const
{
  for (const auto & j : joints) {
    if (j.child == link) {
      return &j;
    }
  }
  return nullptr;
}

bool approx_equal(const ToolDesign & a, const ToolDesign & b, double tol)
{
  if (a.links.size() != b.links.size() || a.joints.size() != b.joints.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.links.size(); ++i) {
    const auto & x = a.links[i];
    const auto & y = b.links[i];
    if (x.name != y.name || !near(x.half_extents, y.half_extents, tol) ||
        std::abs(x.mass - y.mass) > tol || !near(x.origin, y.origin, tol) ||
        x.color.has_value() != y.color.has_value())
    {
      return false;
    }
    if (x.color) {
      for (int k = 0; k < 4; ++k) {
        if (std::abs((*x.color)[k] - (*y.color)[k]) > tol) {
          return false;
        }
      }
    }
  }
  for (std::size_t i = 0; i < a.joints.size(); ++i) {
    const auto & x = a.joints[i];
    const auto & y = b.joints[i];
    if (x.name != y.name || x.parent != y.parent || x.child != y.child || !near(x.origin, y.origin, tol)) {
      return false;
    }
  }
  if (a.attachment.index() != b.attachment.index()) {
    return false;
  }
  if (const auto * fa = std::get_if<GripperFingersAttachment>(&a.attachment)) {
    const auto & fb = std::get<GripperFingersAttachment>(b.attachment);
    return fa->left_roots == fb.left_roots && fa->right_roots == fb.right_roots;
  }
  return true;
}

const BaseLink * RobotDescription::find_base_link(const std::string & link) const
{
  for (const auto & l : base_links) {
    if (l.name == link) {
      return &l;
    }
  }
  return nullptr;
}

Pose RobotDescription::frame_in_end_effector(const std::string & frame) const
{
  Pose pose;
  std::string current = frame;
  for (std::size_t guard = 0; current != end_effector_frame; ++guard) {
    const BaseLink * link = find_base_link(current);
    if (link == nullptr || !link->parent || guard > base_links.size()) {
      throw ValidationError(
        Violation::BadAttachment, "frame '" + frame + "' is not below '" + end_effector_frame + "'");
    }
    pose = link->origin.to_pose() * pose;
    current = *link->parent;
  }
  return pose;
}

bool approx_equal(const RobotDescription & a, const RobotDescription & b, double tol)
{
  if (a.name != b.name || a.end_effector_frame != b.end_effector_frame ||
      a.gripper_present != b.gripper_present || a.base_links.size() != b.base_links.size())
  {
    return false;
  }
  for (std::size_t i = 0; i < a.base_links.size(); ++i) {
    const auto & x = a.base_links[i];
    const auto & y = b.base_links[i];
    if (x.name != y.name || x.parent != y.parent || x.joint_name != y.joint_name ||
        x.joint_type != y.joint_type || !near(x.origin, y.origin, tol))
    {
      return false;
    }
  }
  const ToolDesign empty;
  return approx_equal(a.tool.value_or(empty), b.tool.value_or(empty), tol);
}

RobotDescription blank_robot(bool with_gripper)
{
  RobotDescription robot;
  robot.gripper_present = with_gripper;
  robot.base_links.push_back(BaseLink{"panda_link0", std::nullopt, "", "", Origin{}});
  robot.base_links.push_back(
    BaseLink{kVirtualFlange, std::string("panda_link0"), "panda_virtual_joint", "floating", Origin{}});
  if (with_gripper) {
    // Open-finger frames, 8 cm apart, 10 cm below the flange.
    robot.base_links.push_back(BaseLink{
      kLeftFinger, std::string(kVirtualFlange), "panda_finger_joint1", "prismatic",
      Origin{Vec3(0.0, 0.04, -0.10), Vec3::Zero()}});
    robot.base_links.push_back(BaseLink{
      kRightFinger, std::string(kVirtualFlange), "panda_finger_joint2", "prismatic",
      Origin{Vec3(0.0, -0.04, -0.10), Vec3::Zero()}});
  }
  return robot;
}

void validate(const ToolDesign & tool)
{
  std::set<std::string> names;
  for (const auto & l : tool.links) {
    if (!names.insert(l.name).second || kBaseFrames.count(l.name) != 0) {
      throw ValidationError(Violation::DuplicateName, "link name '" + l.name + "' is not unique");
    }
  }
  for (const auto & l : tool.links) {
    if (!l.half_extents.allFinite() || (l.half_extents.array() <= 0.0).any()) {
      throw ValidationError(Violation::Extents, "link '" + l.name + "' has a non-positive box size");
    }
    if (!l.origin.xyz.allFinite() || !l.origin.rpy.allFinite()) {
      throw ValidationError(Violation::Structure, "link '" + l.name + "' has a non-finite origin");
    }
    if (!(l.mass > 0.0) || l.mass > kMaxLinkMass) {
      throw ValidationError(
        Violation::Mass, "link '" + l.name + "' weighs " + format_number(l.mass) + " kg; allowed (0, 0.01]");
    }
  }
  std::map<std::string, int> parents;
  std::set<std::string> joint_names;
  for (const auto & j : tool.joints) {
    if (!joint_names.insert(j.name).second) {
      throw ValidationError(Violation::DuplicateName, "joint name '" + j.name + "' is not unique");
    }
    if (names.count(j.child) == 0) {
      throw ValidationError(Violation::Structure, "joint '" + j.name + "' has unknown child '" + j.child + "'");
    }
    if (names.count(j.parent) == 0 && !is_attachment_frame(j.parent)) {
      throw ValidationError(
        Violation::BadAttachment, "joint '" + j.name + "' attaches to unknown frame '" + j.parent + "'");
    }
    if (!j.origin.xyz.allFinite() || !j.origin.rpy.allFinite()) {
      throw ValidationError(Violation::Structure, "joint '" + j.name + "' has a non-finite origin");
    }
    ++parents[j.child];
  }
  for (const auto & l : tool.links) {
    const int n = parents[l.name];
    if (n == 0) {
      throw ValidationError(Violation::BadAttachment, "link '" + l.name + "' is not attached to anything");
    }
    if (n > 1) {
      throw ValidationError(Violation::Structure, "link '" + l.name + "' has more than one parent");
    }
  }
  for (const auto & l : tool.links) {
    std::string current = l.name;
    for (std::size_t depth = 0; !is_attachment_frame(current); ++depth) {
      if (depth > tool.links.size()) {
        throw ValidationError(Violation::Structure, "joint cycle through link '" + l.name + "'");
      }
      current = tool.parent_joint(current)->parent;
    }
  }
  const Attachment derived = derive_attachment(tool);
  ToolDesign probe;
  probe.attachment = derived;
  ToolDesign stored;
  stored.attachment = tool.attachment;
  if (!approx_equal(probe, stored)) {
    throw ValidationError(Violation::BadAttachment, "declared attachment does not match joint parents");
  }
  const auto frames = link_frames(tool);
  for (const auto & j : tool.joints) {
    if (is_attachment_frame(j.parent)) {
      continue;
    }
    const BoxLink & parent = *tool.find_link(j.parent);
    const BoxLink & child = *tool.find_link(j.child);
    const Aabb pa =
      OrientedBox::from_pose(frames.at(parent.name).pose * parent.origin.to_pose(), parent.half_extents).aabb();
    const Aabb ca =
      OrientedBox::from_pose(frames.at(child.name).pose * child.origin.to_pose(), child.half_extents).aabb();
    if (!pa.overlaps(ca, kGapTolerance)) {
      throw ValidationError(
        Violation::Gap, "link '" + child.name + "' does not touch its parent '" + parent.name + "'");
    }
  }
}

ToolDesign parse_tool_fragment(const std::string & text)
{
  ToolDesign tool;
  tool.source_text = text;
  const std::string body = strip_declarations(text);
  if (all_space(body)) {
    return tool;
  }
  xml::Element root;
  try {
    root = xml::parse("<toolsmith-fragment>" + body + "</toolsmith-fragment>");
  } catch (const xml::XmlError & e) {
    throw ParseError(std::string("malformed URDF fragment: ") + e.what());
  }
  const xml::Element * scope = &root;
  if (root.children.size() == 1 && root.children.front().name == "robot") {
    scope = &root.children.front();
  }
  std::vector<const xml::Element *> elements;
  for (const auto & c : scope->children) {
    elements.push_back(&c);
  }
  collect(elements, tool);
  validate(tool);
  return tool;
}

std::string serialize_tool_fragment(const ToolDesign & tool)
{
  std::ostringstream os;
  write_tool(os, tool, "");
  return os.str();
}

std::string serialize_robot(const RobotDescription & robot)
{
  std::ostringstream os;
  os << "<?xml version=\"1.0\"?>\n";
  os << "<robot name=\"" << escape(robot.name) << "\">\n";
  for (const auto & l : robot.base_links) {
    os << "  <link name=\"" << escape(l.name) << "\"/>\n";
  }
  for (const auto & l : robot.base_links) {
    if (!l.parent) {
      continue;
    }
    os << "  <joint name=\"" << escape(l.joint_name) << "\" type=\"" << escape(l.joint_type) << "\">\n";
    os << "    <parent link=\"" << escape(*l.parent) << "\"/>\n";
    os << "    <child link=\"" << escape(l.name) << "\"/>\n";
    write_origin(os, l.origin, "    ");
    if (l.joint_type == "prismatic") {
      const double sign = l.origin.xyz.y() < 0.0 ? -1.0 : 1.0;
      os << "    <axis xyz=\"0 " << format_number(sign) << " 0\"/>\n";
      os << "    <limit lower=\"0\" upper=\"0.04\" effort=\"20\" velocity=\"0.2\"/>\n";
    }
    os << "  </joint>\n";
  }
  if (robot.tool) {
    write_tool(os, *robot.tool, "  ");
  }
  os << "</robot>\n";
  return os.str();
}

RobotDescription parse_robot(const std::string & text)
{
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const xml::XmlError & e) {
    throw ParseError(std::string("malformed URDF: ") + e.what());
  }
  if (root.name != "robot") {
    throw ParseError("URDF root element must be <robot>, got <" + root.name + ">");
  }
  RobotDescription robot;
  robot.name = root.attribute("name").value_or("");
  std::vector<const xml::Element *> tool_elements;
  std::map<std::string, const xml::Element *> base_joints;
  for (const auto & c : root.children) {
    if (c.name == "link" && kBaseFrames.count(c.attribute("name").value_or("")) != 0) {
      robot.base_links.push_back(BaseLink{*c.attribute("name"), std::nullopt, "", "", Origin{}});
      continue;
    }
    if (c.name == "joint") {
      const auto * child = c.child("child");
      const std::string child_link = child ? child->attribute("link").value_or("") : "";
      if (kBaseFrames.count(child_link) != 0) {
        base_joints[child_link] = &c;
        continue;
      }
    }
    tool_elements.push_back(&c);
  }
  for (auto & l : robot.base_links) {
    const auto it = base_joints.find(l.name);
    if (it == base_joints.end()) {
      continue;
    }
    const xml::Element & j = *it->second;
    const auto * parent = j.child("parent");
    if (parent == nullptr || !parent->attribute("link")) {
      throw ValidationError(Violation::Structure, "base joint for '" + l.name + "' has no parent");
    }
    l.parent = *parent->attribute("link");
    l.joint_name = j.attribute("name").value_or("");
    l.joint_type = j.attribute("type").value_or("");
    l.origin = parse_origin(j.child("origin"));
  }
  if (robot.find_base_link(robot.end_effector_frame) == nullptr) {
    throw ValidationError(Violation::Structure, "robot has no '" + robot.end_effector_frame + "' frame");
  }
  robot.gripper_present =
    robot.find_base_link(kLeftFinger) != nullptr && robot.find_base_link(kRightFinger) != nullptr;
  if (!tool_elements.empty()) {
    ToolDesign tool;
    collect(tool_elements, tool);
    validate(tool);
    tool.source_text = serialize_tool_fragment(tool);
    if (!tool.links.empty() || !tool.joints.empty()) {
      robot.tool = std::move(tool);
    }
  }
  return robot;
}

RobotDescription merge(const RobotDescription & robot, const ToolDesign & tool)
{
  if (robot.tool) {
    throw ValidationError(Violation::DuplicateTool, "robot already carries a tool");
  }
  if (tool.uses_gripper() && !robot.gripper_present) {
    throw ValidationError(Violation::BadAttachment, "finger attachments need a robot with a gripper");
  }
  for (const auto & l : tool.links) {
    if (robot.find_base_link(l.name) != nullptr) {
      throw ValidationError(Violation::DuplicateName, "tool link '" + l.name + "' clashes with a robot link");
    }
  }
  for (const auto & j : tool.joints) {
    if (is_attachment_frame(j.parent) && robot.find_base_link(j.parent) == nullptr) {
      throw ValidationError(Violation::BadAttachment, "robot has no frame '" + j.parent + "'");
    }
  }
  RobotDescription out = robot;
  if (!tool.links.empty() || !tool.joints.empty()) {
    out.tool = tool;
  }
  return out;
}

std::vector<OrientedBox> tool_boxes(
  const ToolDesign & tool, const Pose & ee_pose, const RobotDescription & robot)
{
  std::vector<OrientedBox> out;
  if (tool.links.empty()) {
    return out;
  }
  const auto frames = link_frames(tool);
  std::map<std::string, Pose> attachment_poses;
  for (const auto & l : tool.links) {
    const LinkFrame & f = frames.at(l.name);
    auto it = attachment_poses.find(f.attachment_frame);
    if (it == attachment_poses.end()) {
      it = attachment_poses
             .emplace(f.attachment_frame, ee_pose * robot.frame_in_end_effector(f.attachment_frame))
             .first;
    }
    out.push_back(OrientedBox::from_pose(it->second * f.pose * l.origin.to_pose(), l.half_extents));
  }
  return out;
}

std::vector<OrientedBox> tool_boxes(const ToolDesign & tool, const Pose & ee_pose)
{
  return tool_boxes(tool, ee_pose, blank_robot(tool.uses_gripper()));
}

Aabb tool_bounding_box(const ToolDesign & tool, const Pose & ee_pose)
{
  const auto boxes = tool_boxes(tool, ee_pose);
  if (boxes.empty()) {
    return Aabb::from_point(ee_pose.position);
  }
  Aabb box;
  for (const auto & b : boxes) {
    box.expand(b.aabb());
  }
  return box;
}

}  // namespace toolsmith
