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

#include "toolsmith/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace toolsmith
{
namespace
{

constexpr double kContactTol = 1e-7;
constexpr int kResolveIterations = 16;
constexpr int kPropagationPasses = 8;
// Half-size of the finger pad region when the fingers carry no tool parts.
constexpr double kDefaultPadHalfX = 0.01;
constexpr double kDefaultPadHalfZ = 0.025;

const OrientedBox kFloor{Vec3(0.0, 0.0, -0.5), Mat3::Identity(), Vec3(50.0, 50.0, 0.5)};

bool footprint_overlaps(const Aabb & a, const Aabb & b)
{
  const double eps = 1e-9;
  return a.min.x() < b.max.x() - eps && b.min.x() < a.max.x() - eps && a.min.y() < b.max.y() - eps &&
         b.min.y() < a.max.y() - eps;
}

bool footprint_contains(const Aabb & a, const Vec3 & p)
{
  return p.x() >= a.min.x() && p.x() <= a.max.x() && p.y() >= a.min.y() && p.y() <= a.max.y();
}

void shift(SceneObject & o, const Vec3 & d) { o.pose.position += d; }

// Moves the object out of fixed geometry. Returns the remaining depth.
double project_out(SceneObject & o, const std::vector<Primitive> & fixed)
{
  for (int i = 0; i < kResolveIterations; ++i) {
    const auto c = deepest_contact(fixed, o.primitives(), kContactTol);
    if (!c) {
      return 0.0;
    }
    shift(o, c->normal * c->depth);
  }
  const auto c = deepest_contact(fixed, o.primitives(), kContactTol);
  return c ? c->depth : 0.0;
}

std::vector<Primitive> as_primitives(const std::vector<OrientedBox> & boxes)
{
  return std::vector<Primitive>(boxes.begin(), boxes.end());
}

Aabb local_bounds(const SceneObject & o, const Pose & frame)
{
  const Pose inv = frame.inverse();
  const Mat3 r = inv.rotation();
  Aabb out;
  for (const auto & p : o.primitives()) {
    if (const auto * box = std::get_if<OrientedBox>(&p)) {
      OrientedBox local{inv.apply(box->center), r * box->rotation, box->half_extents};
      out.expand(local.aabb());
    } else {
      const auto & ball = std::get<Ball>(p);
      out.expand(bounds(Ball{inv.apply(ball.center), ball.radius}));
    }
  }
  return out;
}

bool graspable(const SceneObject & o, const ToolGeometry & tool, const Pose & ee)
{
  const Vec3 mid = 0.5 * (tool.left_finger.position + tool.right_finger.position);
  Aabb pads;
  for (std::size_t i = 0; i < tool.boxes.size(); ++i) {
    if (tool.sides[i] != ToolGeometry::Side::Flange) {
      pads.expand(tool.boxes[i].aabb());
    }
  }
  const double hx = pads.empty() ? kDefaultPadHalfX : std::max(kDefaultPadHalfX, 0.5 * pads.size().x());
  const double hz = pads.empty() ? kDefaultPadHalfZ : std::max(kDefaultPadHalfZ, 0.5 * pads.size().z());
  const Aabb region{
    mid - Vec3(hx, 0.5 * tool.grasp_width, hz), mid + Vec3(hx, 0.5 * tool.grasp_width, hz)};
  const Aabb b = local_bounds(o, ee);
  const bool inside_span = b.min.y() >= region.min.y() && b.max.y() <= region.max.y();
  const bool reaches = b.min.x() <= region.max.x() && b.max.x() >= region.min.x() &&
                       b.min.z() <= region.max.z() && b.max.z() >= region.min.z();
  return inside_span && reaches;
}

bool contained(const SceneObject & o, const ToolGeometry & tool, const std::vector<OrientedBox> & world_boxes,
               const Pose & ee)
{
  if (world_boxes.size() < 2) {
    return false;
  }
  Aabb shell;
  for (const auto & b : tool.boxes) {
    shell.expand(b.aabb());
  }
  const Vec3 c = o.pose.position;
  if (!shell.contains(ee.inverse().apply(c))) {
    return false;
  }
  auto hit = [&](const Vec3 & dir) {
    for (const auto & b : world_boxes) {
      if (ray_hit(b, c, dir)) {
        return true;
      }
    }
    return false;
  };
  if (!hit(-Vec3::UnitZ())) {
    return false;
  }
  int walls = 0;
  const std::array<Vec3, 4> lateral{Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0)};
  for (const Vec3 & d : lateral) {
    walls += hit(d) ? 1 : 0;
  }
  return walls >= 3;
}

// Objects that ride along with the tool this step.
std::set<std::string> carried_objects(
  const SceneState & s, const ToolGeometry & tool, const std::vector<OrientedBox> & world_boxes,
  const SimParams & params)
{
  std::set<std::string> carried(s.grasped.begin(), s.grasped.end());
  std::vector<Aabb> supports;
  for (const auto & b : world_boxes) {
    supports.push_back(b.aabb());
  }
  for (const auto & id : carried) {
    for (const auto & p : s.at(id).primitives()) {
      supports.push_back(bounds(p));
    }
  }
  for (const auto & [id, o] : s.objects) {
    if (o.movable && o.collidable && !carried.count(id) && contained(o, tool, world_boxes, s.ee_pose)) {
      carried.insert(id);
      for (const auto & p : o.primitives()) {
        supports.push_back(bounds(p));
      }
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto & [id, o] : s.objects) {
      if (!o.movable || !o.collidable || carried.count(id)) {
        continue;
      }
      const Aabb b = o.bounds();
      const Vec3 c = b.center();
      const bool resting = std::any_of(supports.begin(), supports.end(), [&](const Aabb & sup) {
        return std::abs(b.min.z() - sup.max.z()) <= params.support_tolerance && footprint_contains(sup, c);
      });
      if (resting) {
        carried.insert(id);
        for (const auto & p : o.primitives()) {
          supports.push_back(bounds(p));
        }
        changed = true;
      }
    }
  }
  return carried;
}

void settle(SceneState & s, const std::set<std::string> & carried, const std::vector<OrientedBox> & tool_world,
            const SimParams & params)
{
  std::vector<std::pair<double, std::string>> order;
  for (const auto & [id, o] : s.objects) {
    if (o.movable && o.collidable && !carried.count(id)) {
      order.emplace_back(o.bounds().min.z(), id);
    }
  }
  std::sort(order.begin(), order.end());
  for (const auto & [unused, id] : order) {
    SceneObject & o = s.objects.at(id);
    const Aabb b = o.bounds();
    const Vec3 c = b.center();
    std::vector<Aabb> candidates{bounds(Primitive(kFloor))};
    for (const auto & [other_id, other] : s.objects) {
      if (other_id == id || !other.collidable) {
        continue;
      }
      for (const auto & p : other.primitives()) {
        candidates.push_back(bounds(p));
      }
    }
    for (const auto & t : tool_world) {
      candidates.push_back(t.aabb());
    }
    double support = -std::numeric_limits<double>::infinity();
    for (const auto & a : candidates) {
      if (!footprint_overlaps(a, b) || a.max.z() > b.min.z() + params.support_tolerance) {
        continue;
      }
      if (a.max.z() > support && footprint_contains(a, c)) {
        support = a.max.z();
      }
    }
    if (std::isfinite(support) && b.min.z() > support) {
      shift(o, Vec3(0.0, 0.0, support - b.min.z()));
    }
  }
}

}  // namespace

std::vector<Primitive> SceneObject::primitives_at(const Pose & at) const
{
  std::vector<Primitive> out;
  if (const auto * box = std::get_if<BoxShape>(&shape)) {
    out.emplace_back(OrientedBox::from_pose(at, box->half_extents));
  } else if (const auto * ball = std::get_if<SphereShape>(&shape)) {
    out.emplace_back(Ball{at.position, ball->radius});
  } else {
    for (const auto & part : std::get<CompositeShape>(shape).parts) {
      out.emplace_back(OrientedBox::from_pose(at * part.offset, part.half_extents));
    }
  }
  return out;
}

Aabb SceneObject::bounds() const { return toolsmith::bounds(primitives()); }

const SceneObject & SceneState::at(const std::string & id) const
{
  auto it = objects.find(id);
  if (it == objects.end()) {
    throw std::out_of_range("no scene object '" + id + "'");
  }
  return it->second;
}

namespace
{

bool same_shape(const Shape & a, const Shape & b)
{
  if (a.index() != b.index()) {
    return false;
  }
  if (const auto * x = std::get_if<BoxShape>(&a)) {
    return x->half_extents == std::get<BoxShape>(b).half_extents;
  }
  if (const auto * x = std::get_if<SphereShape>(&a)) {
    return x->radius == std::get<SphereShape>(b).radius;
  }
  const auto & pa = std::get<CompositeShape>(a).parts;
  const auto & pb = std::get<CompositeShape>(b).parts;
  if (pa.size() != pb.size()) {
    return false;
  }
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!(pa[i].offset == pb[i].offset) || pa[i].half_extents != pb[i].half_extents) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool identical(const SceneState & a, const SceneState & b)
{
  if (!(a.ee_pose == b.ee_pose) || a.gripper_open != b.gripper_open || a.step_index != b.step_index ||
      a.grasped != b.grasped || a.objects.size() != b.objects.size())
  {
    return false;
  }
  for (auto ia = a.objects.begin(), ib = b.objects.begin(); ia != a.objects.end(); ++ia, ++ib) {
    const auto & x = ia->second;
    const auto & y = ib->second;
    if (ia->first != ib->first || x.id != y.id || !same_shape(x.shape, y.shape) || !(x.pose == y.pose) ||
        x.movable != y.movable || x.collidable != y.collidable || x.held_speed != y.held_speed ||
        x.color != y.color)
    {
      return false;
    }
  }
  return true;
}

bool operator==(const Diagnostic & a, const Diagnostic & b)
{
  return a.kind == b.kind && a.object == b.object && a.first_step == b.first_step && a.count == b.count &&
         a.max_value == b.max_value;
}

bool identical(const RolloutResult & a, const RolloutResult & b)
{
  if (!identical(a.final_state, b.final_state) || a.trajectory_length != b.trajectory_length ||
      a.diagnostics != b.diagnostics || a.state_log.has_value() != b.state_log.has_value())
  {
    return false;
  }
  if (a.state_log) {
    if (a.state_log->size() != b.state_log->size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.state_log->size(); ++i) {
      if (!identical((*a.state_log)[i], (*b.state_log)[i])) {
        return false;
      }
    }
  }
  return true;
}

ToolGeometry ToolGeometry::from_robot(const RobotDescription & robot)
{
  ToolGeometry g;
  g.gripper = robot.gripper_present;
  if (robot.gripper_present) {
    g.left_finger = robot.frame_in_end_effector(kLeftFinger);
    g.right_finger = robot.frame_in_end_effector(kRightFinger);
  }
  double pad_width = 0.0;
  if (robot.tool) {
    const ToolDesign & tool = *robot.tool;
    g.boxes = tool_boxes(tool, Pose::identity(), robot);
    Aabb left;
    Aabb right;
    for (std::size_t i = 0; i < tool.links.size(); ++i) {
      std::string root = tool.links[i].name;
      std::string parent = kVirtualFlange;
      for (std::size_t guard = 0; guard <= tool.links.size(); ++guard) {
        const FixedJoint * j = tool.parent_joint(root);
        if (j == nullptr) {
          break;
        }
        parent = j->parent;
        if (tool.find_link(parent) == nullptr) {
          break;
        }
        root = parent;
      }
      Side side = Side::Flange;
      if (parent == kLeftFinger) {
        side = Side::Left;
        left.expand(g.boxes[i].aabb());
      } else if (parent == kRightFinger) {
        side = Side::Right;
        right.expand(g.boxes[i].aabb());
      }
      g.sides.push_back(side);
    }
    pad_width = (left.empty() ? 0.0 : left.size().y()) + (right.empty() ? 0.0 : right.size().y());
  }
  if (g.gripper) {
    g.grasp_width = (g.left_finger.position - g.right_finger.position).norm() + pad_width;
  }
  return g;
}

std::vector<OrientedBox> ToolGeometry::at(const Pose & ee_pose) const
{
  const Mat3 r = ee_pose.rotation();
  std::vector<OrientedBox> out;
  out.reserve(boxes.size());
  for (const auto & b : boxes) {
    out.push_back(OrientedBox{ee_pose.apply(b.center), r * b.rotation, b.half_extents});
  }
  return out;
}

void DiagnosticLog::add(const std::string & kind, const std::string & object, std::size_t step, double value)
{
  auto [it, inserted] = entries_.try_emplace({kind, object}, Diagnostic{kind, object, step, 0, value});
  it->second.count += 1;
  it->second.max_value = std::max(it->second.max_value, value);
}

std::vector<Diagnostic> DiagnosticLog::entries() const
{
  std::vector<Diagnostic> out;
  for (const auto & [key, d] : entries_) {
    out.push_back(d);
  }
  std::stable_sort(out.begin(), out.end(), [](const Diagnostic & a, const Diagnostic & b) {
    return a.first_step < b.first_step;
  });
  return out;
}

Vec3 clamp_to_workspace(const Vec3 & p, const SimParams & params)
{
  const Vec3 d = p - params.workspace_center;
  const double n = d.norm();
  if (n <= params.workspace_radius) {
    return p;
  }
  return params.workspace_center + d * (params.workspace_radius / n);
}

SceneState quasi_static_step(
  const SceneState & state, const Pose & next_ee_pose, bool gripper_closed, const ToolGeometry & tool,
  const SimParams & params, DiagnosticLog * log)
{
  SceneState out = state;
  const std::size_t step = state.step_index + 1;
  out.step_index = step;
  auto note = [&](const char * kind, const std::string & id, double value) {
    if (log != nullptr) {
      log->add(kind, id, step, value);
    }
  };

  const auto old_boxes = tool.at(state.ee_pose);
  const std::set<std::string> carried = carried_objects(state, tool, old_boxes, params);

  const Pose delta = next_ee_pose * state.ee_pose.inverse();
  for (const auto & id : carried) {
    SceneObject & o = out.objects.at(id);
    o.pose = delta * o.pose;
    o.pose.orientation.normalize();
  }
  out.ee_pose = next_ee_pose;

  const auto new_boxes = tool.at(next_ee_pose);
  const auto tool_prims = as_primitives(new_boxes);
  std::vector<Primitive> fixed{kFloor};
  for (const auto & [id, o] : out.objects) {
    if (!o.movable && o.collidable) {
      const auto prims = o.primitives();
      fixed.insert(fixed.end(), prims.begin(), prims.end());
      if (const auto c = deepest_contact(tool_prims, prims, kContactTol)) {
        note("tool_penetration", id, c->depth);
      }
    }
  }

  // Objects moved by the tool this step outrank resting ones when resolving
  // overlaps between movables.
  std::map<std::string, int> rank;
  for (auto & [id, o] : out.objects) {
    if (!o.movable || !o.collidable) {
      continue;
    }
    if (carried.count(id)) {
      rank[id] = 2;
      const double left = project_out(o, fixed);
      if (left > 0.0) {
        note("penetration", id, left);
      }
      continue;
    }
    rank[id] = 0;
    bool pushed = false;
    for (int i = 0; i < kResolveIterations; ++i) {
      const auto c = deepest_contact(tool_prims, o.primitives(), kContactTol);
      if (!c) {
        break;
      }
      pushed = true;
      shift(o, c->normal * c->depth);
      project_out(o, fixed);
    }
    if (pushed) {
      rank[id] = 1;
      if (const auto c = deepest_contact(tool_prims, o.primitives(), kContactTol)) {
        note("penetration", id, c->depth);
      }
    }
  }

  for (int pass = 0; pass < kPropagationPasses; ++pass) {
    bool any = false;
    for (auto a = rank.begin(); a != rank.end(); ++a) {
      for (auto b = std::next(a); b != rank.end(); ++b) {
        if (a->second == 2 && b->second == 2) {
          continue;
        }
        SceneObject & oa = out.objects.at(a->first);
        SceneObject & ob = out.objects.at(b->first);
        const auto c = deepest_contact(oa.primitives(), ob.primitives(), kContactTol);
        if (!c) {
          continue;
        }
        any = true;
        const Vec3 d = c->normal * c->depth;
        if (a->second > b->second) {
          shift(ob, d);
          project_out(ob, fixed);
          b->second = std::max(b->second, 1);
        } else if (b->second > a->second) {
          shift(oa, -d);
          project_out(oa, fixed);
          a->second = std::max(a->second, 1);
        } else {
          shift(ob, 0.5 * d);
          shift(oa, -0.5 * d);
          project_out(oa, fixed);
          project_out(ob, fixed);
        }
      }
    }
    if (!any) {
      break;
    }
  }

  settle(out, carried, new_boxes, params);

  if (gripper_closed && state.gripper_open && tool.gripper) {
    for (const auto & [id, o] : out.objects) {
      if (o.movable && o.collidable && graspable(o, tool, next_ee_pose)) {
        out.grasped.push_back(id);
      }
    }
  } else if (!gripper_closed && !state.gripper_open) {
    for (const auto & id : out.grasped) {
      note("released", id, 0.0);
    }
    out.grasped.clear();
    // Released objects drop in the same step.
    settle(out, {}, new_boxes, params);
  }
  out.gripper_open = !gripper_closed;

  for (const auto & [id, before] : state.objects) {
    SceneObject & o = out.objects.at(id);
    if (!o.movable) {
      continue;
    }
    const double speed = (o.pose.position - before.pose.position).norm() / params.step_duration;
    o.held_speed = std::max(o.held_speed, speed);
  }
  return out;
}

std::unique_ptr<SimulatorBackend> BuiltinBackend::clone() const
{
  return std::make_unique<BuiltinBackend>(params_);
}

RolloutResult BuiltinBackend::rollout(
  const SceneState & scene, const RobotDescription & robot, const DenseTrajectory & traj) const
{
  RolloutResult result;
  result.trajectory_length = path_length(traj);
  const ToolGeometry tool = ToolGeometry::from_robot(robot);
  DiagnosticLog log;
  SceneState s = scene;
  if (params_.record_log) {
    result.state_log.emplace();
  }
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto & sample = traj.samples[i];
    Pose target = sample.pose;
    const Vec3 clamped = clamp_to_workspace(target.position, params_);
    if (clamped != target.position) {
      log.add("workspace_clamp", "", i, (target.position - clamped).norm());
      target.position = clamped;
    }
    if (i == 0) {
      // The arm starts at the first waypoint.
      s.ee_pose = target;
      s.step_index = 0;
      s = quasi_static_step(s, target, sample.gripper_closed, tool, params_, &log);
      s.step_index = 0;
    } else {
      s = quasi_static_step(s, target, sample.gripper_closed, tool, params_, &log);
    }
    const bool last = i + 1 == traj.samples.size();
    if (result.state_log && (last || i % std::max<std::size_t>(1, params_.log_every) == 0)) {
      result.state_log->push_back(s);
    }
  }
  result.final_state = std::move(s);
  result.diagnostics = log.entries();
  return result;
}

RolloutResult rollout(
  const SimulatorBackend & backend, const SceneState & scene, const RobotDescription & robot,
  const DenseTrajectory & traj)
{
  return backend.rollout(scene, robot, traj);
}

}  // namespace toolsmith
