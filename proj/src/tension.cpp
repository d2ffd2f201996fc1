#include "climb/tension.hpp"

#include <cmath>

#include "climb/lp.hpp"

namespace climb {

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& gmap) {
  if (gmap.cols() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gmap, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol =
      std::max(gmap.rows(), gmap.cols()) * (sv.size() ? sv(0) : 0.0) * 1e-13 + 1e-300;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(gmap.cols() - rank);
}

namespace {

// Internal LP variables per boom block: [F, Mp+, Mp-, Mt+, Mt-].
LpProblem build_problem(const Eigen::MatrixXd& gmap, const Eigen::Matrix<double, 6, 1>& w,
                        const ActuationLimits& lim, const AllocateOptions& opt) {
  const int blocks = static_cast<int>(gmap.cols()) / 3;
  const int n = 5 * blocks;
  LpProblem p;
  p.c.resize(n);
  p.a_eq.resize(6, n);
  p.b_eq = w;
  p.lower.resize(n);
  p.upper.resize(n);
  const double wm = 1.0 / opt.length_scale;
  for (int k = 0; k < blocks; ++k) {
    const Eigen::Matrix<double, 6, 1> cf = gmap.col(3 * k + 0);
    const Eigen::Matrix<double, 6, 1> cp = gmap.col(3 * k + 1);
    const Eigen::Matrix<double, 6, 1> ct = gmap.col(3 * k + 2);
    p.a_eq.col(5 * k + 0) = cf;
    p.a_eq.col(5 * k + 1) = cp;
    p.a_eq.col(5 * k + 2) = -cp;
    p.a_eq.col(5 * k + 3) = ct;
    p.a_eq.col(5 * k + 4) = -ct;
    p.c(5 * k + 0) = 1.0;
    p.c.segment<4>(5 * k + 1).setConstant(wm);
    p.lower(5 * k + 0) = std::max(lim.force_min, opt.min_tension);
    p.upper(5 * k + 0) = lim.force_max;
    const double mhi = std::max(lim.moment_max, 0.0);
    const double mlo = std::max(-lim.moment_min, 0.0);
    p.lower.segment<4>(5 * k + 1).setZero();
    p.upper(5 * k + 1) = mhi;
    p.upper(5 * k + 2) = mlo;
    p.upper(5 * k + 3) = mhi;
    p.upper(5 * k + 4) = mlo;
  }
  return p;
}

Eigen::VectorXd to_tau(const Eigen::VectorXd& x, int blocks) {
  Eigen::VectorXd tau(3 * blocks);
  for (int k = 0; k < blocks; ++k) {
    tau(3 * k + 0) = x(5 * k + 0);
    tau(3 * k + 1) = x(5 * k + 1) - x(5 * k + 2);
    tau(3 * k + 2) = x(5 * k + 3) - x(5 * k + 4);
  }
  return tau;
}

}  // namespace

AllocationResult allocate_wrench(const Eigen::MatrixXd& gmap, const Wrench& desired,
                                 const ActuationLimits& limits, const AllocateOptions& opt) {
  AllocationResult out;
  const int blocks = static_cast<int>(gmap.cols()) / 3;
  if (blocks == 0) {
    out.failure = AllocationFailure{"no attached booms", {}};
    return out;
  }
  LpProblem p = build_problem(gmap, desired.stacked(), limits, opt);
  LpResult r = solve_lp(p);
  if (r.status != LpStatus::kOptimal) {
    out.failure = AllocationFailure{
        r.status == LpStatus::kInfeasible ? "no tension-consistent allocation"
                                          : "lp did not terminate",
        r.violated_rows};
    return out;
  }

  if (opt.lex_tie_break) {
    // Freeze the optimal effort, then minimize tau components one at a time;
    // the result is the lexicographically smallest optimizer.
    LpProblem q = p;
    const int n = static_cast<int>(p.c.size());
    auto append_row = [&q, n](const Eigen::RowVectorXd& row, double rhs) {
      Eigen::MatrixXd a(q.a_eq.rows() + 1, n);
      a.topRows(q.a_eq.rows()) = q.a_eq;
      a.bottomRows(1) = row;
      q.a_eq = a;
      Eigen::VectorXd b(q.b_eq.size() + 1);
      b.head(q.b_eq.size()) = q.b_eq;
      b(q.b_eq.size()) = rhs;
      q.b_eq = b;
    };
    append_row(p.c.transpose(), r.objective);
    Eigen::VectorXd x = r.x;
    for (int k = 0; k < blocks; ++k) {
      for (int c = 0; c < 3; ++c) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
        if (c == 0) {
          row(5 * k + 0) = 1.0;
        } else {
          row(5 * k + 2 * c - 1) = 1.0;
          row(5 * k + 2 * c) = -1.0;
        }
        q.c = row.transpose();
        LpResult rs = solve_lp(q);
        if (rs.status != LpStatus::kOptimal) break;  // keep the last good point
        x = rs.x;
        append_row(row, rs.objective);
      }
    }
    r.x = x;
  }

  ControlVector cv;
  cv.tau = to_tau(r.x, blocks);
  out.control = std::move(cv);
  return out;
}

Wrench equilibrium_wrench(const RobotModel& model, const BodyPose& pose,
                          std::optional<int> detached_boom,
                          const std::vector<Eigen::Vector3d>& anchor_by_boom) {
  Wrench w;
  w.force = Eigen::Vector3d(0, 0, model.mass_body * model.gravity);
  if (detached_boom) {
    const Eigen::Vector3d g_force(0, 0, -model.mass_gripper * model.gravity);
    const Eigen::Vector3d arm = anchor_by_boom[*detached_boom] - pose.position;
    w.force -= g_force;
    w.moment -= arm.cross(g_force);
  }
  return w;
}

AllocationResult static_equilibrium_controls(const RobotModel& model, const BodyPose& pose,
                                             const std::vector<Eigen::Vector3d>& anchor_by_boom,
                                             const std::vector<bool>& attached,
                                             std::optional<int> detached_boom,
                                             const AllocateOptions* opt_override) {
  JointState joints(model.boom_count());
  std::vector<bool> att = attached;
  if (detached_boom) att[*detached_boom] = false;
  for (int i = 0; i < model.boom_count(); ++i) {
    if (!att[i]) continue;
    IkResult ik = inverse_joint_solve(model, pose, anchor_by_boom[i], i);
    joints[i] = ik.joints;
  }
  const Eigen::MatrixXd gmap = grasp_map(model, pose, joints, att);
  AllocateOptions opt;
  if (opt_override) {
    opt = *opt_override;
  } else {
    opt.min_tension = model.min_tension;
    opt.length_scale = model.body_length;
  }
  std::vector<int> idx;
  for (size_t i = 0; i < att.size(); ++i)
    if (att[i]) idx.push_back(static_cast<int>(i));
  AllocationResult res = allocate_wrench(
      gmap, equilibrium_wrench(model, pose, detached_boom, anchor_by_boom),
      model.actuation_limits, opt);
  if (res.control) res.control->boom_indices = idx;
  return res;
}

}  // namespace climb
