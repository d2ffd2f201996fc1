#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "climb/mesh.hpp"

namespace climb {

struct ShoulderMount {
  Eigen::Vector3d position_body{0, 0, 0};
  // Boresight is the mount x axis; the pan axis is the mount z axis and the
  // tilt axis is the (pan-rotated) mount y axis.
  Eigen::Matrix3d frame_body = Eigen::Matrix3d::Identity();
};

struct JointLimits {
  double pan_min = -3.14159265358979323846;
  double pan_max = 3.14159265358979323846;
  double tilt_min = 0.0;
  double tilt_max = 0.5 * 3.14159265358979323846;
  double ext_min = 0.2;
  double ext_max = 10.0;
};

struct ActuationLimits {
  double force_min = 0.0;    // N, prismatic
  double force_max = 40.0;   // N
  double moment_min = -10.0; // N*m, pan and tilt
  double moment_max = 10.0;  // N*m
};

struct RobotModel {
  double body_length = 0.8;
  double body_diameter = 0.4;
  double mass_body = 10.0;
  double mass_gripper = 1.0;
  Eigen::Matrix3d inertia_body = Eigen::Vector3d(0.2, 0.633, 0.633).asDiagonal();
  double gravity = 3.721;  // m/s^2, world -z
  std::vector<ShoulderMount> shoulders;
  JointLimits joint_limits;
  ActuationLimits actuation_limits;
  double min_tension = 1.0;  // N, smallest allowed boom tension

  int boom_count() const { return static_cast<int>(shoulders.size()); }
  void validate() const;  // throws std::invalid_argument

  // Eight-boom layout: three per lateral side, two overhead.
  static RobotModel default_model();
};

struct BodyPose {
  Eigen::Vector3d position{0, 0, 0};
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Eigen::Matrix3d rotation() const { return orientation.toRotationMatrix(); }
  Eigen::Vector3d to_world(const Eigen::Vector3d& p_body) const {
    return position + orientation * p_body;
  }
};

struct BoomJoints {
  double pan = 0.0;   // rad
  double tilt = 0.0;  // rad
  double extension = 0.0;  // m
};

using JointState = std::vector<BoomJoints>;

struct Anchor {
  int id = 0;
  Eigen::Vector3d position{0, 0, 0};
  std::string limit_surface_ref;  // optional
};

// Analytic tunnel: free space is the interior of an infinite cylinder.
struct TunnelGeometry {
  Eigen::Vector3d axis_point{0, 0, 0};
  Eigen::Vector3d axis_dir{1, 0, 0};  // unit
  double radius = 2.0;
};

struct SphereObstacle {
  Eigen::Vector3d center{0, 0, 0};
  double radius = 0.1;
};

struct Environment {
  std::vector<Anchor> anchors;
  std::optional<TunnelGeometry> tunnel;
  std::vector<SphereObstacle> spheres;
  std::shared_ptr<TriMesh> mesh;        // optional collision mesh
  std::shared_ptr<MeshGrid> mesh_grid;  // built lazily alongside mesh

  const Anchor* find_anchor(int id) const;
  void validate() const;  // unique ids
};

enum class IkStatus { kOk, kUnreachable, kLimitViolation };

struct IkResult {
  IkStatus status = IkStatus::kOk;
  BoomJoints joints;
  bool ok() const { return status == IkStatus::kOk; }
};

// --- kinematics -----------------------------------------------------------

Eigen::Vector3d boom_direction_world(const RobotModel& model, const BodyPose& pose,
                                     int boom_index, const BoomJoints& joints);

Eigen::Vector3d shoulder_world(const RobotModel& model, const BodyPose& pose, int boom_index);

// Gripper tip position for every boom.
std::vector<Eigen::Vector3d> forward_kinematics(const RobotModel& model, const BodyPose& pose,
                                                const JointState& joints);

Eigen::Vector3d forward_kinematics_boom(const RobotModel& model, const BodyPose& pose,
                                        int boom_index, const BoomJoints& joints);

// Pan/tilt/extension that place the gripper at `anchor`. Joints are returned
// even when limits are violated so callers can report the offending value.
IkResult inverse_joint_solve(const RobotModel& model, const BodyPose& pose,
                             const Eigen::Vector3d& anchor, int boom_index);

// --- grasp map (controls -> body wrench) ----------------------------------

// Columns per attached boom: [F_prismatic, M_pan, M_tilt]. The prismatic
// column is the unit wrench of a pull toward the anchor applied at the
// shoulder; pan/tilt columns are reaction-force wrenches perpendicular to
// the boom with magnitude 1/b per unit moment.
// Throws DegenerateBoomError when an attached extension is below ext_min.
Eigen::MatrixXd grasp_map(const RobotModel& model, const BodyPose& pose,
                          const JointState& joints, const std::vector<bool>& attached);

struct DegenerateBoomError : std::runtime_error {
  explicit DegenerateBoomError(const std::string& what) : std::runtime_error(what) {}
};

// --- collision -------------------------------------------------------------

struct CollisionConfig {
  double boom_margin = 0.02;     // clearance for zero-radius boom segments
  double anchor_clearance = 0.10;  // boom segment shortened near the anchor end
};

bool collision_check(const RobotModel& model, const BodyPose& pose, const JointState& joints,
                     const Environment& env, const CollisionConfig& cfg = {});

}  // namespace climb
