#include "climb/footstep.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "climb/rng.hpp"
#include "climb/so3.hpp"

namespace climb {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

BodyPose perturbed(const BodyPose& base, CounterRng& rng, double sigma_pos, double sigma_rot) {
  BodyPose p;
  p.position = base.position + sigma_pos * Eigen::Vector3d(rng.gaussian(), rng.gaussian(),
                                                           rng.gaussian());
  const Eigen::Vector3d dtheta =
      sigma_rot * Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
  p.orientation = quat_retract(base.orientation, dtheta);
  return p;
}

bool pose_ok(const RobotModel& model, const BodyPose& pose, const std::vector<int>& anchors,
             const Environment& env, std::optional<int> detached, const CollisionConfig& ccfg) {
  return pose_feasible(model, pose, anchors, env, detached, ccfg).ok;
}

}  // namespace

std::string Stance::id() const {
  std::string out;
  for (size_t i = 0; i < anchor_by_boom.size(); ++i) {
    if (i) out += ':';
    out += std::to_string(anchor_by_boom[i]);
  }
  return out;
}

TransitionCheck transition_feasible(const Stance& a, const Stance& b, const RobotModel& model,
                                    const Environment& env, const PlannerConfig& cfg) {
  TransitionCheck out;
  int moved = -1;
  for (size_t i = 0; i < a.anchor_by_boom.size(); ++i) {
    if (a.anchor_by_boom[i] != b.anchor_by_boom[i]) {
      if (moved >= 0) {
        out.status = TransitionStatus::kNotAdjacent;
        return out;
      }
      moved = static_cast<int>(i);
    }
  }
  if (moved < 0) {
    // Zero-move transition: any feasible pose of the stance certifies.
    if (pose_ok(model, a.pose, a.anchor_by_boom, env, std::nullopt, cfg.collision)) {
      out.status = TransitionStatus::kFeasible;
      out.pose = a.pose;
    }
    return out;
  }

  auto certify = [&](const BodyPose& pose) {
    return pose_ok(model, pose, a.anchor_by_boom, env, std::nullopt, cfg.collision) &&
           pose_ok(model, pose, a.anchor_by_boom, env, moved, cfg.collision) &&
           pose_ok(model, pose, b.anchor_by_boom, env, moved, cfg.collision) &&
           pose_ok(model, pose, b.anchor_by_boom, env, std::nullopt, cfg.collision);
  };

  // Centroid of the union anchor set as the first candidate.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::set<int> union_ids(a.anchor_by_boom.begin(), a.anchor_by_boom.end());
  union_ids.insert(b.anchor_by_boom[moved]);
  for (int id : union_ids) centroid += env.find_anchor(id)->position;
  centroid /= static_cast<double>(union_ids.size());

  BodyPose candidate;
  candidate.position = centroid;
  candidate.orientation = a.pose.orientation;
  if (certify(candidate)) {
    out.status = TransitionStatus::kFeasible;
    out.pose = candidate;
    return out;
  }
  // Deterministic per-edge stream keyed by the stance pair.
  CounterRng rng = CounterRng::substream(cfg.seed, fnv1a(a.id()), fnv1a(b.id()));
  for (int k = 0; k < cfg.n_pose_samples; ++k) {
    const BodyPose p = perturbed(candidate, rng, cfg.sigma_position, cfg.sigma_orientation);
    if (certify(p)) {
      out.status = TransitionStatus::kFeasible;
      out.pose = p;
      return out;
    }
  }
  out.status = TransitionStatus::kNoFeasiblePose;
  return out;
}

StanceGraph::StanceGraph(const RobotModel& model, const Environment& env, PlannerConfig cfg)
    : model_(model), env_(env), cfg_(cfg) {}

std::vector<int> StanceGraph::admissible_anchors(const Stance& s, int boom) const {
  std::vector<int> out;
  for (const Anchor& a : env_.anchors) {
    if (inverse_joint_solve(model_, s.pose, a.position, boom).ok()) out.push_back(a.id);
  }
  return out;
}

std::vector<StanceGraph::Edge> StanceGraph::neighbors(const Stance& s) {
  std::vector<Edge> edges;
  std::set<int> in_use(s.anchor_by_boom.begin(), s.anchor_by_boom.end());
  for (int boom = 0; boom < model_.boom_count(); ++boom) {
    for (int aid : admissible_anchors(s, boom)) {
      if (in_use.count(aid)) continue;  // anchors stay distinct per stance
      Stance next = s;
      next.anchor_by_boom[boom] = aid;

      const std::string key = s.id() + ">" + next.id();
      auto it = edge_cache_.find(key);
      if (it == edge_cache_.end()) {
        it = edge_cache_.emplace(key, transition_feasible(s, next, model_, env_, cfg_)).first;
      }
      if (!it->second.feasible()) continue;
      next.pose = it->second.pose;
      edges.push_back(Edge{next, it->second.pose, boom, s.anchor_by_boom[boom], aid});
    }
  }
  return edges;
}

std::optional<BodyPose> goal_pose_for(const Stance& s, const GoalRegion& goal,
                                      const RobotModel& model, const Environment& env,
                                      const PlannerConfig& cfg) {
  if ((s.pose.position - goal.center).norm() <= goal.radius &&
      pose_ok(model, s.pose, s.anchor_by_boom, env, std::nullopt, cfg.collision))
    return s.pose;
  BodyPose centered = s.pose;
  centered.position = goal.center;
  if (pose_ok(model, centered, s.anchor_by_boom, env, std::nullopt, cfg.collision))
    return centered;
  CounterRng rng = CounterRng::substream(cfg.seed, fnv1a(s.id()), 0xA0A1ULL);
  for (int k = 0; k < cfg.n_pose_samples; ++k) {
    BodyPose p = perturbed(centered, rng, 0.5 * goal.radius, cfg.sigma_orientation);
    if ((p.position - goal.center).norm() > goal.radius) continue;
    if (pose_ok(model, p, s.anchor_by_boom, env, std::nullopt, cfg.collision)) return p;
  }
  return std::nullopt;
}

PlanResult plan_footsteps(StanceGraph& graph, const Stance& start, const GoalRegion& goal,
                          const RobotModel& model, const Environment& env) {
  PlanResult res;
  const PlannerConfig& cfg = graph.config();
  if (!pose_feasible(model, start.pose, start.anchor_by_boom, env, std::nullopt,
                     cfg.collision)
           .ok) {
    res.status = PlanStatus::kStartInfeasible;
    return res;
  }

  struct Node {
    Stance stance;
    double cost = 0.0;
    std::string parent;  // empty for the start
    PlannedStep arriving_step;
  };
  std::map<std::string, Node> visited;
  // Lexicographic (cost, id) ordering keeps expansion deterministic.
  using QueueEntry = std::pair<double, std::string>;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;

  const std::string start_id = start.id();
  visited[start_id] = Node{start, 0.0, "", {}};
  open.emplace(0.0, start_id);

  std::string goal_id;
  while (!open.empty()) {
    const auto [cost, id] = open.top();
    open.pop();
    Node& node = visited[id];
    if (cost > node.cost + 1e-12) continue;  // stale entry
    if (goal_pose_for(node.stance, goal, model, env, cfg)) {
      goal_id = id;
      break;
    }
    if (++res.expanded_vertices > cfg.max_expansions) break;

    for (const auto& e : graph.neighbors(node.stance)) {
      const double step_cost = cfg.cost == PlannerConfig::Cost::kTransitions
                                   ? 1.0
                                   : (e.to.pose.position - node.stance.pose.position).norm();
      const double next_cost = node.cost + step_cost;
      const std::string next_id = e.to.id();
      auto it = visited.find(next_id);
      if (it != visited.end() && it->second.cost <= next_cost + 1e-12) continue;
      visited[next_id] =
          Node{e.to, next_cost, id, PlannedStep{e.moved_boom, e.from_anchor, e.to_anchor,
                                                e.transition_pose}};
      open.emplace(next_cost, next_id);
    }
  }

  if (goal_id.empty()) {
    res.status = PlanStatus::kNoPath;
    return res;
  }

  // Reconstruct the path.
  std::vector<std::string> chain;
  for (std::string id = goal_id; !id.empty(); id = visited[id].parent) chain.push_back(id);
  std::reverse(chain.begin(), chain.end());
  for (size_t k = 0; k < chain.size(); ++k) {
    const Node& n = visited[chain[k]];
    res.plan.stances.push_back(n.stance);
    if (k > 0) res.plan.steps.push_back(n.arriving_step);
  }
  res.plan.cost = visited[goal_id].cost;
  res.status = PlanStatus::kOk;
  return res;
}

}  // namespace climb
