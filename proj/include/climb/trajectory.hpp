#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "climb/robot_model.hpp"

namespace climb {

struct StateVector {
  Eigen::Vector3d position{0, 0, 0};
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d lin_momentum{0, 0, 0};
  Eigen::Vector3d ang_momentum{0, 0, 0};

  BodyPose pose() const { return BodyPose{position, orientation}; }
  static StateVector at_rest(const BodyPose& p) {
    StateVector s;
    s.position = p.position;
    s.orientation = p.orientation;
    return s;
  }
};

// Fixed contact pattern a trajectory is integrated against. For an
// end-effector phase the detached gripper follows a prescribed world path
// and its weight loads the body through the shoulder.
struct ContactContext {
  std::vector<Eigen::Vector3d> anchors;  // per boom
  std::vector<bool> attached;
  std::optional<int> detached_boom;

  int attached_count() const {
    int n = 0;
    for (bool a : attached) n += a ? 1 : 0;
    return n;
  }
};

StateVector nonlinear_step(const StateVector& s, const Eigen::VectorXd& tau, double dt,
                           const ContactContext& ctx, const RobotModel& model,
                           const Eigen::Vector3d* detached_gripper_pos = nullptr);

enum class TrajectoryPhase { kBody, kEndEffector };

struct Trajectory {
  TrajectoryPhase phase = TrajectoryPhase::kBody;
  double dt = 0.5;
  int moved_boom = -1;  // end-effector phase only
  std::vector<StateVector> states;
  std::vector<Eigen::VectorXd> controls;          // states.size()-1 entries
  std::vector<Eigen::Vector3d> gripper_path;      // end-effector phase only
  std::vector<int> attached_booms;                // control column map
};

struct ScpConfig {
  double lambda_state = 10.0;
  double lambda_control = 10.0;
  double lambda_min = 1e-2;
  double lambda_max = 1e6;
  int max_iterations = 60;
  double convergence_tol = 1e-4;  // trajectory change, infinity norm
  double defect_tol = 1e-3;       // m and rad per step on rollout
  double dt = 0.5;
  double fd_step = 1e-6;
  double seed_spacing = 0.1;      // m between straight-line waypoints
  int seed_budget = 100;          // perturbation attempts per waypoint
  std::uint64_t seed = 0;
  // Quasi-static regime: hard momentum caps plus a mild damping term keep
  // the iterates inside the linearization's validity region.
  double max_speed = 0.5;         // m/s
  double max_omega = 0.4;         // rad/s
  double damping_lin = 0.5;       // weight on |P|^2
  double damping_ang = 50.0;      // weight on |L|^2
  double hold_pose_weight = 25.0; // body anchor during end-effector phases
  double hold_pos_cap = 0.05;     // m, hard body-motion cap while holding
  double hold_rot_cap = 0.10;     // rad

  void validate() const;
};

enum class ScpStatus { kConverged, kNotConverged, kSubproblemInfeasible, kSeedFailed };

struct ScpDiagnostics {
  int iterations = 0;
  std::vector<double> objective_trace;  // accepted iterations
  double max_defect_pos = 0.0;
  double max_defect_rot = 0.0;
  std::string message;
};

struct ScpResult {
  ScpStatus status = ScpStatus::kNotConverged;
  Trajectory trajectory;
  ScpDiagnostics diagnostics;
  bool ok() const { return status == ScpStatus::kConverged; }
};

// Statically feasible waypoints from start to goal: straight line where
// possible, locally perturbed where not.
struct SeedResult {
  bool ok = false;
  std::vector<BodyPose> waypoints;
};
SeedResult seed_trajectory(const BodyPose& start, const BodyPose& goal,
                           const std::vector<int>& anchor_ids, const Environment& env,
                           const RobotModel& model, const ScpConfig& cfg);

ScpResult scp_solve_body(const RobotModel& model, const Environment& env,
                         const std::vector<int>& anchor_ids, const BodyPose& start,
                         const BodyPose& goal, const ScpConfig& cfg);

// Body holds `hold_pose` while `moved_boom` carries its gripper from one
// anchor position to another along a collision-free path.
ScpResult scp_solve_end_effector(const RobotModel& model, const Environment& env,
                                 const std::vector<int>& anchor_ids, int moved_boom,
                                 const Eigen::Vector3d& from_pos, const Eigen::Vector3d& to_pos,
                                 const BodyPose& hold_pose, const ScpConfig& cfg);

// Largest per-step nonlinear rollout defect of a trajectory.
void rollout_defects(const Trajectory& traj, const ContactContext& ctx, const RobotModel& model,
                     double* max_pos, double* max_rot);

}  // namespace climb
