#pragma once

#include <optional>
#include <string>
#include <vector>

#include "climb/robot_model.hpp"
#include "climb/tension.hpp"

namespace climb {

enum class ViolationKind { kNone, kKinematic, kCollision, kStatic };

struct FeasibilityCertificate {
  bool ok = false;
  std::optional<ControlVector> control;  // equilibrium controls when ok
  ViolationKind violation = ViolationKind::kNone;
  std::string detail;
};

// A pose is feasible when every boom reaches its anchor within joint limits,
// nothing collides, and a static equilibrium allocation exists within the
// actuation limits with all booms in tension. `detached_boom` marks a boom
// whose gripper sits at its anchor but is not load-bearing; the shoulder
// carries its weight instead.
FeasibilityCertificate pose_feasible(const RobotModel& model, const BodyPose& pose,
                                     const std::vector<int>& anchor_ids, const Environment& env,
                                     std::optional<int> detached_boom = std::nullopt,
                                     const CollisionConfig& ccfg = {});

}  // namespace climb
