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

#include "toolsmith/mock_generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "toolsmith/digest.hpp"
#include "toolsmith/sim.hpp"

namespace toolsmith
{
namespace
{

double uniform(std::mt19937_64 & rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64 & rng, std::size_t n)
{
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double mm(double v)
{
  return std::round(v * 1000.0) / 1000.0;
}

double centi(double v)
{
  return std::round(v * 100.0) / 100.0;
}

bool is_base_frame(const std::string & name)
{
  return name == kVirtualFlange || name == kLeftFinger || name == kRightFinger;
}

// Box of `link` in its own link frame.
Aabb local_aabb(const BoxLink & link)
{
  return OrientedBox::from_pose(link.origin.to_pose(), link.half_extents).aabb();
}

// Joint origin that puts `child` against face (axis, sign) of `parent`.
Origin flush_origin(const BoxLink & parent, const BoxLink & child, int axis, int sign, std::mt19937_64 & rng)
{
  const Aabb pa = local_aabb(parent);
  const Aabb ca = local_aabb(child);
  Origin o;
  for (int k = 0; k < 3; ++k) {
    if (k == axis) {
      o.xyz[k] = sign > 0 ? pa.max[k] - ca.min[k] : pa.min[k] - ca.max[k];
    } else {
      const double slack = 0.5 * 0.5 * pa.size()[k];
      o.xyz[k] = pa.center()[k] - ca.center()[k] + uniform(rng, -slack, slack);
    }
    o.xyz[k] = mm(o.xyz[k]);
  }
  return o;
}

std::string fresh_name(const ToolDesign & tool, const std::string & stem)
{
  std::set<std::string> used;
  for (const auto & l : tool.links) {
    used.insert(l.name);
  }
  for (const auto & j : tool.joints) {
    used.insert(j.name);
  }
  for (int i = 0;; ++i) {
    const std::string link = stem + "_" + std::to_string(i);
    if (used.count(link) == 0 && used.count(link + "_joint") == 0) {
      return link;
    }
  }
}

BoxLink random_box(std::mt19937_64 & rng, const std::string & name, double max_half = 0.12)
{
  BoxLink l;
  l.name = name;
  for (int k = 0; k < 3; ++k) {
    l.half_extents[k] = mm(uniform(rng, 0.005, max_half));
  }
  l.mass = std::min(kMaxLinkMass, std::round(uniform(rng, 0.001, kMaxLinkMass) * 1e4) / 1e4);
  return l;
}

void add_leaf(ToolDesign & tool, std::mt19937_64 & rng, const std::string & stem, std::optional<std::size_t> parent_index = {})
{
  const BoxLink parent = tool.links[parent_index ? *parent_index : pick(rng, tool.links.size())];
  BoxLink child = random_box(rng, fresh_name(tool, stem), 0.08);
  const int axis = static_cast<int>(pick(rng, 3));
  const int sign = pick(rng, 2) == 0 ? -1 : 1;
  FixedJoint j{child.name + "_joint", parent.name, child.name, flush_origin(parent, child, axis, sign, rng)};
  tool.links.push_back(child);
  tool.joints.push_back(j);
}

void refresh(ToolDesign & tool)
{
  // Round-trip so the attachment and the source text follow the edited joints.
  tool = parse_tool_fragment(serialize_tool_fragment(tool));
}

bool has_children(const ToolDesign & tool, const std::string & link)
{
  return std::any_of(tool.joints.begin(), tool.joints.end(), [&](const FixedJoint & j) { return j.parent == link; });
}

std::vector<std::string> subtree(const ToolDesign & tool, const std::string & root)
{
  std::vector<std::string> out{root};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto & j : tool.joints) {
      if (j.parent == out[i]) {
        out.push_back(j.child);
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> fit_rows(const ActionPlan & plan, std::size_t width)
{
  auto rows = plan.to_rows();
  for (auto & r : rows) {
    if (r.size() < width) {
      r.push_back(0.0);
    }
    r.resize(width);
  }
  return rows;
}

// Keeps a waypoint inside the reachable ball and above the floor.
void keep_reachable(std::vector<double> & row)
{
  row[2] = std::max(row[2], 0.02);
  const double n = std::sqrt(row[0] * row[0] + row[1] * row[1] + row[2] * row[2]);
  const double limit = kWorkspaceRadius - 0.01;
  if (n > limit) {
    for (int k = 0; k < 3; ++k) {
      row[k] = std::trunc(row[k] * limit / n * 1000.0) / 1000.0;
    }
  }
}

ActionPlan jittered(const ActionPlan & plan, std::size_t width, std::mt19937_64 & rng)
{
  auto rows = fit_rows(plan, width);
  for (auto & r : rows) {
    for (int k = 0; k < 3; ++k) {
      r[k] = mm(r[k] + uniform(rng, -0.02, 0.02));
    }
    keep_reachable(r);
  }
  return ActionPlan::from_rows(rows);
}

// Rows printed one waypoint per line, the way a person would lay them out.
std::string format_plans(const std::vector<ActionPlan> & plans)
{
  std::ostringstream out;
  out << "[\n";
  for (std::size_t p = 0; p < plans.size(); ++p) {
    out << "  [\n";
    const auto rows = plans[p].to_json();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out << "    " << rows[r].dump() << (r + 1 < rows.size() ? ",\n" : "\n");
    }
    out << "  ]" << (p + 1 < plans.size() ? ",\n" : "\n");
  }
  out << "]";
  return out.str();
}

struct Emitted
{
  ToolDesign tool;
  std::vector<ActionPlan> plans;
  std::string note;
};

std::string render_text(const std::vector<Emitted> & designs, bool with_tools)
{
  std::ostringstream out;
  if (!with_tools) {
    std::vector<ActionPlan> all;
    for (const auto & d : designs) {
      all.insert(all.end(), d.plans.begin(), d.plans.end());
    }
    out << "Here are " << all.size() << " action sets.\n\n```json\n" << format_plans(all) << "\n```\n";
    return out.str();
  }
  for (std::size_t i = 0; i < designs.size(); ++i) {
    out << "Tool " << i + 1 << ": " << designs[i].note << "\n\n";
    out << "```xml\n" << serialize_tool_fragment(designs[i].tool) << "\n```\n\n";
    out << "```json\n" << format_plans(designs[i].plans) << "\n```\n\n";
  }
  return out.str();
}

bool is_planted_parent(const ToolDesign & tool)
{
  const FixedJoint * j = tool.parent_joint("blade");
  return j != nullptr && tool.find_link("handle") != nullptr && std::abs(j->origin.xyz.x() - 0.46) < 1e-6;
}

bool link_equal(const BoxLink & a, const BoxLink & b, double tol)
{
  return (a.half_extents - b.half_extents).cwiseAbs().maxCoeff() <= tol && std::abs(a.mass - b.mass) <= tol &&
         (a.origin.xyz - b.origin.xyz).cwiseAbs().maxCoeff() <= tol &&
         (a.origin.rpy - b.origin.rpy).cwiseAbs().maxCoeff() <= tol;
}

bool joint_equal(const FixedJoint & a, const FixedJoint & b, double tol)
{
  return a.parent == b.parent && (a.origin.xyz - b.origin.xyz).cwiseAbs().maxCoeff() <= tol &&
         (a.origin.rpy - b.origin.rpy).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

const char * to_string(EditKind k)
{
  switch (k) {
    case EditKind::Resize:
      return "resize";
    case EditKind::Move:
      return "move";
    case EditKind::Rotate:
      return "rotate";
    case EditKind::Add:
      return "add";
    case EditKind::Remove:
      return "remove";
    case EditKind::Crossover:
      return "crossover";
  }
  return "unknown";
}

ToolDesign planted_tool(bool improved)
{
  ToolDesign t;
  BoxLink handle{"handle", Vec3(0.225, 0.01, 0.01), 0.005, Origin{Vec3(0.225, 0.0, 0.0), Vec3::Zero()}, {}};
  BoxLink blade{"blade", Vec3(0.01, 0.06, 0.03), 0.005, Origin{}, {}};
  t.links = {handle, blade};
  t.joints = {
    FixedJoint{"handle_joint", kVirtualFlange, "handle", Origin{}},
    FixedJoint{"blade_joint", "handle", "blade", Origin{Vec3(improved ? 0.31 : 0.46, 0.0, -0.03), Vec3::Zero()}},
  };
  refresh(t);
  return t;
}

ActionPlan planted_plan()
{
  return ActionPlan::from_rows({
    {0.2, 0.0, 0.2, 0.0, 0.0, 0.0},
    {0.8, 0.0, 0.2, 0.0, 0.0, 0.0},
    {0.8, 0.0, 0.07, 0.0, 0.0, 0.0},
    {0.17, 0.0, 0.07, 0.0, 0.0, 0.0},
  });
}

ToolDesign random_tool(std::mt19937_64 & rng, bool gripper)
{
  ToolDesign t;
  if (!gripper) {
    BoxLink root = random_box(rng, "link_0");
    const Vec3 h = root.half_extents;
    const Vec3 offsets[] = {Vec3(0.0, 0.0, -h.z()), Vec3(h.x(), 0.0, 0.0), Vec3(h.x(), 0.0, -h.z())};
    root.origin.xyz = offsets[pick(rng, 3)];
    t.links.push_back(root);
    t.joints.push_back({"link_0_joint", kVirtualFlange, "link_0", Origin{}});
    const std::size_t extra = pick(rng, 4);
    for (std::size_t i = 0; i < extra; ++i) {
      add_leaf(t, rng, "link");
    }
  } else {
    for (const char * side : {"left", "right"}) {
      BoxLink root = random_box(rng, std::string(side) + "_0", 0.05);
      root.half_extents.y() = mm(uniform(rng, 0.003, 0.012));
      root.origin.xyz = Vec3(0.0, 0.0, -root.half_extents.z());
      t.links.push_back(root);
      t.joints.push_back({root.name + "_joint", std::string(side) == "left" ? kLeftFinger : kRightFinger, root.name, Origin{}});
    }
    const std::size_t extra = pick(rng, 3);
    for (std::size_t i = 0; i < extra; ++i) {
      add_leaf(t, rng, "link");
    }
  }
  refresh(t);
  return t;
}

ActionPlan random_plan(std::mt19937_64 & rng, std::size_t row_width)
{
  const std::size_t n = 2 + pick(rng, 5);
  std::vector<std::vector<double>> rows;
  int gripper = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r{mm(uniform(rng, 0.2, 0.8)), mm(uniform(rng, -0.4, 0.4)), mm(uniform(rng, 0.02, 0.5))};
    keep_reachable(r);
    const double yaw = pick(rng, 3) == 0 ? centi(uniform(rng, -1.5, 1.5)) : 0.0;
    r.insert(r.end(), {0.0, 0.0, yaw});
    if (row_width == 7) {
      if (i > 0 && pick(rng, 3) == 0) {
        gripper = 1 - gripper;
      }
      r.push_back(gripper);
    }
    rows.push_back(std::move(r));
  }
  return ActionPlan::from_rows(rows);
}

ToolDesign mutate(const ToolDesign & parent, std::mt19937_64 & rng, int max_attempts, EditKind * applied)
{
  for (int attempt = 0; attempt < max_attempts && !parent.links.empty(); ++attempt) {
    const auto kind = static_cast<EditKind>(pick(rng, 5));
    ToolDesign t = parent;
    t.source_text.clear();
    switch (kind) {
      case EditKind::Resize: {
        BoxLink & l = t.links[pick(rng, t.links.size())];
        const std::size_t axis = pick(rng, 3);
        l.half_extents[axis] = std::max(0.003, mm(l.half_extents[axis] * uniform(rng, 0.5, 1.6)));
        break;
      }
      case EditKind::Move: {
        FixedJoint & j = t.joints[pick(rng, t.joints.size())];
        const double d = uniform(rng, 0.005, 0.05) * (pick(rng, 2) == 0 ? -1.0 : 1.0);
        const std::size_t axis = pick(rng, 3);
        j.origin.xyz[axis] = mm(j.origin.xyz[axis] + d);
        break;
      }
      case EditKind::Rotate: {
        FixedJoint & j = t.joints[pick(rng, t.joints.size())];
        const double d = uniform(rng, M_PI / 12.0, M_PI / 4.0) * (pick(rng, 2) == 0 ? -1.0 : 1.0);
        const std::size_t axis = pick(rng, 3);
        j.origin.rpy[axis] = centi(wrap_angle(j.origin.rpy[axis] + d));
        break;
      }
      case EditKind::Add:
        add_leaf(t, rng, "link");
        break;
      case EditKind::Remove: {
        std::vector<std::size_t> leaves;
        for (std::size_t i = 0; i < t.links.size(); ++i) {
          if (!has_children(t, t.links[i].name)) {
            leaves.push_back(i);
          }
        }
        if (t.links.size() < 2 || leaves.empty()) {
          continue;
        }
        const std::string gone = t.links[leaves[pick(rng, leaves.size())]].name;
        t.links.erase(std::find_if(t.links.begin(), t.links.end(), [&](const BoxLink & l) { return l.name == gone; }));
        t.joints.erase(
          std::find_if(t.joints.begin(), t.joints.end(), [&](const FixedJoint & j) { return j.child == gone; }));
        break;
      }
      case EditKind::Crossover:
        break;
    }
    try {
      refresh(t);
    } catch (const std::exception &) {
      continue;
    }
    if (structural_diff(parent, t) != 1) {
      continue;
    }
    if (applied != nullptr) {
      *applied = kind;
    }
    return t;
  }
  // Always possible: a small box on top of the first link.
  ToolDesign t = parent;
  if (t.links.empty()) {
    BoxLink root = random_box(rng, "link_0");
    t.links.push_back(root);
    t.joints.push_back({"link_0_joint", kVirtualFlange, root.name, Origin{}});
  } else {
    BoxLink child = random_box(rng, fresh_name(t, "link"), 0.03);
    t.joints.push_back({child.name + "_joint", t.links.front().name, child.name,
                        flush_origin(t.links.front(), child, 2, 1, rng)});
    t.links.push_back(child);
  }
  refresh(t);
  if (applied != nullptr) {
    *applied = EditKind::Add;
  }
  return t;
}

ToolDesign crossover(const ToolDesign & a, const ToolDesign & b, std::mt19937_64 & rng)
{
  if (a.links.empty() || b.links.empty()) {
    return mutate(a, rng, 20);
  }
  const auto names = subtree(b, b.links[pick(rng, b.links.size())].name);
  ToolDesign t = a;
  std::set<std::string> used;
  for (const auto & l : t.links) {
    used.insert(l.name);
  }
  for (const auto & j : t.joints) {
    used.insert(j.name);
  }
  std::map<std::string, std::string> rename;
  auto unique = [&used](std::string n) {
    while (used.count(n) != 0) {
      n += "_b";
    }
    used.insert(n);
    return n;
  };
  for (const auto & n : names) {
    rename[n] = unique(n);
  }
  const BoxLink & anchor = *std::find_if(a.links.begin(), a.links.end(), [&](const BoxLink & l) {
    const FixedJoint * j = a.parent_joint(l.name);
    return j != nullptr && is_base_frame(j->parent);
  });
  for (const auto & n : names) {
    BoxLink l = *b.find_link(n);
    l.name = rename.at(n);
    const FixedJoint & src = *b.parent_joint(n);
    FixedJoint j{unique(src.name), "", l.name, src.origin};
    if (n == names.front()) {
      j.parent = anchor.name;
      j.origin = flush_origin(anchor, l, 2, 1, rng);
    } else {
      j.parent = rename.at(src.parent);
    }
    t.links.push_back(l);
    t.joints.push_back(j);
  }
  try {
    refresh(t);
  } catch (const std::exception &) {
    return mutate(a, rng, 20);
  }
  return t;
}

std::size_t structural_diff(const ToolDesign & a, const ToolDesign & b, double tol)
{
  std::size_t diff = 0;
  std::set<std::string> names;
  for (const auto & l : a.links) {
    names.insert(l.name);
  }
  for (const auto & l : b.links) {
    names.insert(l.name);
  }
  for (const auto & n : names) {
    const BoxLink * la = a.find_link(n);
    const BoxLink * lb = b.find_link(n);
    if (la == nullptr || lb == nullptr) {
      ++diff;
      continue;
    }
    if (!link_equal(*la, *lb, tol)) {
      ++diff;
    }
    const FixedJoint * ja = a.parent_joint(n);
    const FixedJoint * jb = b.parent_joint(n);
    if ((ja == nullptr) != (jb == nullptr) || (ja != nullptr && !joint_equal(*ja, *jb, tol))) {
      ++diff;
    }
  }
  return diff;
}

bool combines(const ToolDesign & child, const ToolDesign & a, const ToolDesign & b, double tol)
{
  for (const auto & l : a.links) {
    const BoxLink * c = child.find_link(l.name);
    if (c == nullptr || !link_equal(*c, l, tol)) {
      return false;
    }
  }
  for (const auto & l : child.links) {
    if (a.find_link(l.name) != nullptr) {
      continue;
    }
    for (const auto & lb : b.links) {
      if (l.name.rfind(lb.name, 0) == 0 && (l.half_extents - lb.half_extents).cwiseAbs().maxCoeff() <= tol) {
        return true;
      }
    }
  }
  return false;
}

MockGenerator::MockGenerator(std::uint64_t seed, MockOptions options) : seed_(seed), options_(options) {}

std::string MockGenerator::identity() const
{
  return "mock:" + std::to_string(seed_) + (options_.planted ? ":planted" : "");
}

Completion MockGenerator::complete(const PromptBundle & bundle, int agent_id) const
{
  Completion c;
  c.text = generate(bundle, agent_id);
  c.usage.prompt_tokens = static_cast<long>(bundle.text().size() / 4);
  c.usage.completion_tokens = static_cast<long>(c.text.size() / 4);
  return c;
}

std::string MockGenerator::generate(const PromptBundle & bundle, int agent_id) const
{
  std::mt19937_64 rng(sha256_u64(
    std::to_string(seed_) + "|" + bundle.hash() + "|" + std::to_string(agent_id) + (options_.planted ? "|p" : "")));
  const std::size_t width = bundle.row_width();
  const bool planted = options_.planted && bundle.task_name == "BringCube" && agent_id == 0 && !bundle.gripper;

  struct Parent
  {
    ToolDesign tool;
    ActionPlan plan;
    std::string id;
  };
  std::vector<Parent> parents;
  for (const auto & e : bundle.elites) {
    try {
      parents.push_back({parse_tool_fragment(e.urdf), e.plan, e.id});
    } catch (const std::exception &) {
    }
  }

  std::vector<Emitted> designs;
  if (!bundle.expects_tools()) {
    Emitted d;
    for (int p = 0; p < bundle.n_action; ++p) {
      d.plans.push_back(random_plan(rng, width));
    }
    designs.push_back(std::move(d));
    return render_text(designs, false);
  }

  for (int t = 0; t < bundle.n_tool; ++t) {
    Emitted d;
    std::optional<ActionPlan> base_plan;
    if (planted && t == 0 && bundle.mission == Mission::Evolution) {
      auto it = std::find_if(parents.begin(), parents.end(), [](const Parent & p) { return is_planted_parent(p.tool); });
      if (it != parents.end()) {
        d.tool = planted_tool(true);
        d.note = "move of " + it->id + " (blade joint)";
        base_plan = it->plan;
      }
    }
    if (d.note.empty() && planted && t == 0 && bundle.mission != Mission::Evolution) {
      d.tool = planted_tool(false);
      d.note = "long scraper with a blade at the far end";
      base_plan = planted_plan();
    }
    if (d.note.empty() && bundle.mission == Mission::Evolution && !parents.empty()) {
      const std::size_t ia = pick(rng, parents.size());
      if (parents.size() >= 2 && uniform(rng, 0.0, 1.0) < options_.crossover_rate) {
        std::size_t ib = pick(rng, parents.size() - 1);
        ib += ib >= ia ? 1 : 0;
        d.tool = crossover(parents[ia].tool, parents[ib].tool, rng);
        d.note = "crossover of " + parents[ia].id + " and " + parents[ib].id;
      } else {
        EditKind kind = EditKind::Add;
        d.tool = mutate(parents[ia].tool, rng, options_.max_attempts, &kind);
        d.note = std::string(to_string(kind)) + " of " + parents[ia].id;
      }
      base_plan = parents[ia].plan;
    }
    if (d.note.empty()) {
      d.tool = random_tool(rng, bundle.gripper);
      d.note = "box tree with " + std::to_string(d.tool.links.size()) + " links";
    }
    for (int p = 0; p < bundle.n_action; ++p) {
      if (base_plan && p == 0) {
        d.plans.push_back(ActionPlan::from_rows(fit_rows(*base_plan, width)));
      } else if (base_plan) {
        d.plans.push_back(jittered(*base_plan, width, rng));
      } else {
        d.plans.push_back(random_plan(rng, width));
      }
    }
    designs.push_back(std::move(d));
  }
  return render_text(designs, true);
}

}  // namespace toolsmith
