#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "climb/robot_model.hpp"

namespace climb {

struct Wrench {
  Eigen::Vector3d force{0, 0, 0};   // N, world
  Eigen::Vector3d moment{0, 0, 0};  // N*m, about body COM

  Eigen::Matrix<double, 6, 1> stacked() const {
    Eigen::Matrix<double, 6, 1> w;
    w << force, moment;
    return w;
  }
  static Wrench from_stacked(const Eigen::Matrix<double, 6, 1>& w) {
    return Wrench{w.head<3>(), w.tail<3>()};
  }
};

// Stacked [F_prismatic, M_pan, M_tilt] per attached boom.
struct ControlVector {
  Eigen::VectorXd tau;
  std::vector<int> boom_indices;  // which booms the blocks refer to

  int attached_count() const { return static_cast<int>(boom_indices.size()); }
  double prismatic(int block) const { return tau(3 * block + 0); }
  double pan_moment(int block) const { return tau(3 * block + 1); }
  double tilt_moment(int block) const { return tau(3 * block + 2); }
};

struct AllocationFailure {
  std::string reason;
  std::vector<int> violated_rows;  // wrench rows that could not be met
};

struct AllocationResult {
  std::optional<ControlVector> control;
  std::optional<AllocationFailure> failure;
  bool ok() const { return control.has_value(); }
};

struct AllocateOptions {
  double min_tension = 1.0;     // N
  double length_scale = 0.8;    // moment weight is 1/length_scale
  bool lex_tie_break = true;    // resolve degenerate optima deterministically
};

// Orthonormal basis of { v : gmap * v = 0 }.
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& gmap);

// Eq. 2: min sum|F| + (1/len)*sum(|Mp|+|Mt|)  s.t.  gmap*tau = w,
// F in [min_tension, F_max], M in [M_min, M_max].
AllocationResult allocate_wrench(const Eigen::MatrixXd& gmap, const Wrench& desired,
                                 const ActuationLimits& limits, const AllocateOptions& opt);

// Controls that hold the body static under gravity, with the weight of a
// detached gripper (if any) carried through its shoulder.
AllocationResult static_equilibrium_controls(const RobotModel& model, const BodyPose& pose,
                                             const std::vector<Eigen::Vector3d>& anchor_by_boom,
                                             const std::vector<bool>& attached,
                                             std::optional<int> detached_boom = std::nullopt,
                                             const AllocateOptions* opt_override = nullptr);

// Gravity-cancelling wrench, including the detached-gripper term.
Wrench equilibrium_wrench(const RobotModel& model, const BodyPose& pose,
                          std::optional<int> detached_boom,
                          const std::vector<Eigen::Vector3d>& anchor_by_boom);

}  // namespace climb
