#include "climb/robot_model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace climb {

namespace {
constexpr double kPi = 3.14159265358979323846;

Eigen::Matrix3d frame_from_boresight(const Eigen::Vector3d& boresight,
                                     const Eigen::Vector3d& pan_axis) {
  Eigen::Matrix3d f;
  const Eigen::Vector3d x = boresight.normalized();
  const Eigen::Vector3d z = (pan_axis - pan_axis.dot(x) * x).normalized();
  f.col(0) = x;
  f.col(2) = z;
  f.col(1) = z.cross(x);
  return f;
}
}  // namespace

void RobotModel::validate() const {
  if (shoulders.size() != 8) throw std::invalid_argument("model: expected exactly 8 shoulders");
  if (mass_body <= 0 || mass_gripper <= 0) throw std::invalid_argument("model: masses must be > 0");
  if (!inertia_body.isApprox(inertia_body.transpose(), 1e-9))
    throw std::invalid_argument("model: inertia must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(inertia_body);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("model: inertia must be positive definite");
  const double rx = 0.5 * body_length + 1e-9;
  const double rr = 0.5 * body_diameter + 1e-9;
  for (const auto& s : shoulders) {
    const Eigen::Vector3d& p = s.position_body;
    if (std::abs(p.x()) > rx || Eigen::Vector2d(p.y(), p.z()).norm() > rr)
      throw std::invalid_argument("model: shoulder outside body envelope");
  }
}

RobotModel RobotModel::default_model() {
  RobotModel m;
  const double r = 0.5 * m.body_diameter;
  auto add = [&m](const Eigen::Vector3d& pos, const Eigen::Vector3d& bore,
                  const Eigen::Vector3d& pan) {
    ShoulderMount s;
    s.position_body = pos;
    s.frame_body = frame_from_boresight(bore, pan);
    m.shoulders.push_back(s);
  };
  // Side mounts look laterally outward and pan about the body z axis.
  for (double x : {-0.3, 0.0, 0.3}) add({x, +r, 0}, {0, 1, 0}, {0, 0, 1});
  for (double x : {-0.3, 0.0, 0.3}) add({x, -r, 0}, {0, -1, 0}, {0, 0, 1});
  // Overhead mounts look up; opposite pan axes split the overhead workspace
  // into forward and backward hemispheres.
  add({+0.2, 0, r}, {0, 0, 1}, {1, 0, 0});
  add({-0.2, 0, r}, {0, 0, 1}, {-1, 0, 0});
  return m;
}

const Anchor* Environment::find_anchor(int id) const {
  for (const auto& a : anchors)
    if (a.id == id) return &a;
  return nullptr;
}

void Environment::validate() const {
  std::set<int> ids;
  for (const auto& a : anchors) {
    if (!ids.insert(a.id).second)
      throw std::invalid_argument("environment: duplicate anchor id " + std::to_string(a.id));
  }
}

Eigen::Vector3d shoulder_world(const RobotModel& model, const BodyPose& pose, int boom_index) {
  return pose.to_world(model.shoulders[boom_index].position_body);
}

Eigen::Vector3d boom_direction_world(const RobotModel& model, const BodyPose& pose,
                                     int boom_index, const BoomJoints& joints) {
  // Direction in the mount frame; tilt elevates toward the pan (z) axis.
  const double ct = std::cos(joints.tilt);
  const Eigen::Vector3d d_m(std::cos(joints.pan) * ct, std::sin(joints.pan) * ct,
                            std::sin(joints.tilt));
  return pose.orientation * (model.shoulders[boom_index].frame_body * d_m);
}

Eigen::Vector3d forward_kinematics_boom(const RobotModel& model, const BodyPose& pose,
                                        int boom_index, const BoomJoints& joints) {
  return shoulder_world(model, pose, boom_index) +
         joints.extension * boom_direction_world(model, pose, boom_index, joints);
}

std::vector<Eigen::Vector3d> forward_kinematics(const RobotModel& model, const BodyPose& pose,
                                                const JointState& joints) {
  std::vector<Eigen::Vector3d> tips(joints.size());
  for (size_t i = 0; i < joints.size(); ++i)
    tips[i] = forward_kinematics_boom(model, pose, static_cast<int>(i), joints[i]);
  return tips;
}

IkResult inverse_joint_solve(const RobotModel& model, const BodyPose& pose,
                             const Eigen::Vector3d& anchor, int boom_index) {
  IkResult res;
  const Eigen::Vector3d s = shoulder_world(model, pose, boom_index);
  const Eigen::Matrix3d mount_w =
      pose.rotation() * model.shoulders[boom_index].frame_body;
  const Eigen::Vector3d v = mount_w.transpose() * (anchor - s);
  const double b = v.norm();
  res.joints.extension = b;
  if (b < 1e-12) {
    res.status = IkStatus::kUnreachable;
    return res;
  }
  res.joints.tilt = std::asin(std::clamp(v.z() / b, -1.0, 1.0));
  const double cxy = std::hypot(v.x(), v.y());
  res.joints.pan = cxy < 1e-12 ? 0.0 : std::atan2(v.y(), v.x());
  const JointLimits& jl = model.joint_limits;
  if (b < jl.ext_min - 1e-12 || b > jl.ext_max + 1e-12) {
    res.status = IkStatus::kUnreachable;
    return res;
  }
  if (res.joints.pan < jl.pan_min - 1e-12 || res.joints.pan > jl.pan_max + 1e-12 ||
      res.joints.tilt < jl.tilt_min - 1e-12 || res.joints.tilt > jl.tilt_max + 1e-12) {
    res.status = IkStatus::kLimitViolation;
    return res;
  }
  res.status = IkStatus::kOk;
  return res;
}

Eigen::MatrixXd grasp_map(const RobotModel& model, const BodyPose& pose,
                          const JointState& joints, const std::vector<bool>& attached) {
  int n_att = 0;
  for (bool a : attached)
    if (a) ++n_att;
  Eigen::MatrixXd g(6, 3 * n_att);
  const Eigen::Matrix3d rot = pose.rotation();
  int col = 0;
  for (size_t i = 0; i < attached.size(); ++i) {
    if (!attached[i]) continue;
    const BoomJoints& j = joints[i];
    if (j.extension < model.joint_limits.ext_min - 1e-12)
      throw DegenerateBoomError("grasp_map: boom " + std::to_string(i) +
                                " extension below minimum");
    const Eigen::Vector3d r_s = rot * model.shoulders[i].position_body;  // shoulder - COM
    const Eigen::Vector3d d = boom_direction_world(model, pose, static_cast<int>(i), j);
    const Eigen::Matrix3d mount_w = rot * model.shoulders[i].frame_body;
    const Eigen::Vector3d pan_axis = mount_w.col(2);
    // Tilt axis follows the pan rotation.
    const Eigen::Vector3d tilt_axis =
        mount_w * (Eigen::AngleAxisd(j.pan, Eigen::Vector3d::UnitZ()) * Eigen::Vector3d::UnitY());

    const Eigen::Vector3d f_prism = d;  // pull toward the anchor
    g.block<3, 1>(0, col + 0) = f_prism;
    g.block<3, 1>(3, col + 0) = r_s.cross(f_prism);

    // Unit actuator moment produces a 1/b reaction force perpendicular to
    // the boom plus the third-law moment on the body.
    const Eigen::Vector3d pan_cross = d.cross(pan_axis);
    if (pan_cross.norm() > 1e-9) {
      const Eigen::Vector3d f_pan = pan_cross.normalized() / j.extension;
      g.block<3, 1>(0, col + 1) = f_pan;
      g.block<3, 1>(3, col + 1) = r_s.cross(f_pan) - pan_axis;
    } else {
      // Boom aligned with the pan axis; panning just rolls the free wrist.
      g.block<3, 1>(0, col + 1).setZero();
      g.block<3, 1>(3, col + 1).setZero();
    }
    const Eigen::Vector3d f_tilt = d.cross(tilt_axis) / j.extension;  // already unit direction
    g.block<3, 1>(0, col + 2) = f_tilt;
    g.block<3, 1>(3, col + 2) = r_s.cross(f_tilt) - tilt_axis;
    col += 3;
  }
  return g;
}

namespace {

double segment_axis_max_radial(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                               const TunnelGeometry& t) {
  auto radial = [&t](const Eigen::Vector3d& p) {
    const Eigen::Vector3d u = p - t.axis_point;
    return (u - u.dot(t.axis_dir) * t.axis_dir).norm();
  };
  // Radial distance is convex along the segment, so the max is at an end.
  return std::max(radial(p0), radial(p1));
}

double segment_sphere_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                               const SphereObstacle& s) {
  const Eigen::Vector3d d = p1 - p0;
  const double len2 = d.squaredNorm();
  double t = len2 < 1e-18 ? 0.0 : std::clamp((s.center - p0).dot(d) / len2, 0.0, 1.0);
  return (p0 + t * d - s.center).norm() - s.radius;
}

}  // namespace

bool collision_check(const RobotModel& model, const BodyPose& pose, const JointState& joints,
                     const Environment& env, const CollisionConfig& cfg) {
  const double body_r = 0.5 * model.body_diameter;
  const double half_len = 0.5 * (model.body_length - model.body_diameter);
  // Capsule axis runs along the body x axis.
  const Eigen::Vector3d ax = pose.orientation * Eigen::Vector3d::UnitX();
  const Eigen::Vector3d b0 = pose.position - half_len * ax;
  const Eigen::Vector3d b1 = pose.position + half_len * ax;

  struct Seg {
    Eigen::Vector3d p0, p1;
  };
  std::vector<Seg> booms;
  for (size_t i = 0; i < joints.size(); ++i) {
    const Eigen::Vector3d s = shoulder_world(model, pose, static_cast<int>(i));
    const Eigen::Vector3d tip =
        forward_kinematics_boom(model, pose, static_cast<int>(i), joints[i]);
    Eigen::Vector3d dir = tip - s;
    const double len = dir.norm();
    if (len < 1e-9) continue;
    dir /= len;
    // Keep clear of the wall right at the grasp point.
    const double cut = std::min(cfg.anchor_clearance, 0.5 * len);
    booms.push_back({s, tip - cut * dir});
  }

  if (env.tunnel) {
    const TunnelGeometry& t = *env.tunnel;
    if (segment_axis_max_radial(b0, b1, t) + body_r >= t.radius) return true;
    for (const auto& seg : booms)
      if (segment_axis_max_radial(seg.p0, seg.p1, t) + cfg.boom_margin >= t.radius) return true;
  }
  for (const auto& s : env.spheres) {
    if (segment_sphere_distance(b0, b1, s) <= body_r) return true;
    for (const auto& seg : booms)
      if (segment_sphere_distance(seg.p0, seg.p1, s) <= cfg.boom_margin) return true;
  }
  if (env.mesh && env.mesh_grid) {
    if (env.mesh_grid->within_distance(b0, b1, body_r)) return true;
    for (const auto& seg : booms)
      if (env.mesh_grid->within_distance(seg.p0, seg.p1, cfg.boom_margin)) return true;
  }
  // Boom-boom interference.
  for (size_t i = 0; i + 1 < booms.size(); ++i) {
    for (size_t k = i + 1; k < booms.size(); ++k) {
      if (segment_segment_distance(booms[i].p0, booms[i].p1, booms[k].p0, booms[k].p1) <
          cfg.boom_margin)
        return true;
    }
  }
  return false;
}

}  // namespace climb
