#include "climb/feasibility.hpp"

namespace climb {

FeasibilityCertificate pose_feasible(const RobotModel& model, const BodyPose& pose,
                                     const std::vector<int>& anchor_ids, const Environment& env,
                                     std::optional<int> detached_boom,
                                     const CollisionConfig& ccfg) {
  FeasibilityCertificate cert;
  const int n = model.boom_count();
  std::vector<Eigen::Vector3d> anchor_pos(n);
  JointState joints(n);
  for (int i = 0; i < n; ++i) {
    const Anchor* a = env.find_anchor(anchor_ids[i]);
    if (!a) {
      cert.violation = ViolationKind::kKinematic;
      cert.detail = "boom " + std::to_string(i) + ": unknown anchor id " +
                    std::to_string(anchor_ids[i]);
      return cert;
    }
    anchor_pos[i] = a->position;
    IkResult ik = inverse_joint_solve(model, pose, a->position, i);
    if (!ik.ok()) {
      cert.violation = ViolationKind::kKinematic;
      cert.detail = "boom " + std::to_string(i) +
                    (ik.status == IkStatus::kUnreachable ? ": unreachable" : ": joint limit");
      return cert;
    }
    joints[i] = ik.joints;
  }

  if (collision_check(model, pose, joints, env, ccfg)) {
    cert.violation = ViolationKind::kCollision;
    cert.detail = "collision";
    return cert;
  }

  std::vector<bool> attached(n, true);
  AllocateOptions opt;
  opt.min_tension = model.min_tension;
  opt.length_scale = model.body_length;
  opt.lex_tie_break = false;  // throughput path; allocation stays deterministic
  AllocationResult alloc = static_equilibrium_controls(model, pose, anchor_pos, attached,
                                                       detached_boom, &opt);
  if (!alloc.ok()) {
    cert.violation = ViolationKind::kStatic;
    cert.detail = alloc.failure ? alloc.failure->reason : "allocation failed";
    return cert;
  }
  cert.ok = true;
  cert.violation = ViolationKind::kNone;
  cert.control = std::move(alloc.control);
  return cert;
}

}  // namespace climb
