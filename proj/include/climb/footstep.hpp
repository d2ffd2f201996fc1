#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "climb/feasibility.hpp"
#include "climb/robot_model.hpp"

namespace climb {

// Assignment of every boom to an anchor plus a pose known to satisfy it.
struct Stance {
  std::vector<int> anchor_by_boom;
  BodyPose pose;

  // Canonical key: anchors joined boom-by-boom, e.g. "3:0:7:...".
  std::string id() const;
};

struct GoalRegion {
  Eigen::Vector3d center{0, 0, 0};
  double radius = 0.5;
};

struct PlannerConfig {
  int n_pose_samples = 200;      // perturbed candidates per transition
  double sigma_position = 0.3;   // m
  double sigma_orientation = 10.0 * 3.14159265358979323846 / 180.0;  // rad
  std::uint64_t seed = 0;
  enum class Cost { kTransitions, kBodyTravel } cost = Cost::kTransitions;
  CollisionConfig collision;
  int max_expansions = 20000;
};

enum class TransitionStatus { kFeasible, kNotAdjacent, kNoFeasiblePose };

struct TransitionCheck {
  TransitionStatus status = TransitionStatus::kNoFeasiblePose;
  BodyPose pose;  // certified against all four conditions when feasible
  bool feasible() const { return status == TransitionStatus::kFeasible; }
};

struct PlannedStep {
  int moved_boom = -1;
  int from_anchor = -1;
  int to_anchor = -1;
  BodyPose transition_pose;
};

struct FootstepPlan {
  std::vector<Stance> stances;      // start first
  std::vector<PlannedStep> steps;   // stances.size() - 1 entries
  double cost = 0.0;
};

enum class PlanStatus { kOk, kNoPath, kStartInfeasible };

struct PlanResult {
  PlanStatus status = PlanStatus::kNoPath;
  FootstepPlan plan;
  int expanded_vertices = 0;
};

// A transition pose must hold in the source 8-stance, in the common
// 7-stance with the moving gripper parked at either anchor, and in the goal
// 8-stance. Candidates are the union-anchor centroid plus seeded Gaussian
// perturbations.
TransitionCheck transition_feasible(const Stance& a, const Stance& b, const RobotModel& model,
                                    const Environment& env, const PlannerConfig& cfg);

// Lazily expanded stance graph over single-boom reassignments.
class StanceGraph {
 public:
  StanceGraph(const RobotModel& model, const Environment& env, PlannerConfig cfg);

  struct Edge {
    Stance to;
    BodyPose transition_pose;
    int moved_boom;
    int from_anchor;
    int to_anchor;
  };

  // Certified outgoing edges, ordered by (boom index, anchor id).
  std::vector<Edge> neighbors(const Stance& s);

  // Anchors a boom could reach from the stance pose, within joint limits.
  std::vector<int> admissible_anchors(const Stance& s, int boom) const;

  const PlannerConfig& config() const { return cfg_; }

 private:
  const RobotModel& model_;
  const Environment& env_;
  PlannerConfig cfg_;
  std::map<std::string, TransitionCheck> edge_cache_;
};

PlanResult plan_footsteps(StanceGraph& graph, const Stance& start, const GoalRegion& goal,
                          const RobotModel& model, const Environment& env);

// Feasible pose whose position lies in the goal region, if one exists for
// this stance. Used for the final approach and for goal tests.
std::optional<BodyPose> goal_pose_for(const Stance& s, const GoalRegion& goal,
                                      const RobotModel& model, const Environment& env,
                                      const PlannerConfig& cfg);

}  // namespace climb
