#include "climb/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "climb/feasibility.hpp"
#include "climb/qp.hpp"
#include "climb/rng.hpp"
#include "climb/so3.hpp"
#include "climb/tension.hpp"

namespace climb {

namespace {

constexpr int kErrDim = 12;  // [dX, dTheta, dP, dL]

Eigen::Matrix<double, kErrDim, 1> state_error(const StateVector& ref, const StateVector& s) {
  Eigen::Matrix<double, kErrDim, 1> z;
  z.segment<3>(0) = s.position - ref.position;
  z.segment<3>(3) = quat_error(ref.orientation, s.orientation);
  z.segment<3>(6) = s.lin_momentum - ref.lin_momentum;
  z.segment<3>(9) = s.ang_momentum - ref.ang_momentum;
  return z;
}

StateVector state_retract(const StateVector& ref, const Eigen::Matrix<double, kErrDim, 1>& z) {
  StateVector s;
  s.position = ref.position + z.segment<3>(0);
  s.orientation = quat_retract(ref.orientation, z.segment<3>(3));
  s.lin_momentum = ref.lin_momentum + z.segment<3>(6);
  s.ang_momentum = ref.ang_momentum + z.segment<3>(9);
  return s;
}

JointState solve_attached_joints(const RobotModel& model, const BodyPose& pose,
                                 const ContactContext& ctx, bool* ok) {
  JointState joints(model.boom_count());
  *ok = true;
  for (int i = 0; i < model.boom_count(); ++i) {
    if (!ctx.attached[i]) continue;
    IkResult ik = inverse_joint_solve(model, pose, ctx.anchors[i], i);
    joints[i] = ik.joints;
    if (ik.status == IkStatus::kUnreachable && ik.joints.extension < model.joint_limits.ext_min)
      *ok = false;
  }
  return joints;
}

}  // namespace

void ScpConfig::validate() const {
  if (lambda_state <= 0 || lambda_control <= 0)
    throw std::invalid_argument("scp: trust weights must be > 0");
  if (dt <= 0) throw std::invalid_argument("scp: dt must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("scp: max_iterations must be >= 1");
}

StateVector nonlinear_step(const StateVector& s, const Eigen::VectorXd& tau, double dt,
                           const ContactContext& ctx, const RobotModel& model,
                           const Eigen::Vector3d* detached_gripper_pos) {
  const BodyPose pose = s.pose();
  bool ok = true;
  const JointState joints = solve_attached_joints(model, pose, ctx, &ok);
  if (!ok) throw DegenerateBoomError("nonlinear_step: attached boom below minimum extension");
  const Eigen::MatrixXd gmap = grasp_map(model, pose, joints, ctx.attached);
  const Eigen::Matrix<double, 6, 1> w = gmap * tau;

  Eigen::Vector3d force = w.head<3>();
  Eigen::Vector3d moment = w.tail<3>();
  force.z() -= model.mass_body * model.gravity;
  if (ctx.detached_boom && detached_gripper_pos) {
    const Eigen::Vector3d g_force(0, 0, -model.mass_gripper * model.gravity);
    force += g_force;
    moment += (*detached_gripper_pos - s.position).cross(g_force);
  }

  StateVector next;
  next.lin_momentum = s.lin_momentum + dt * force;
  next.ang_momentum = s.ang_momentum + dt * moment;
  next.position = s.position + dt * next.lin_momentum / model.mass_body;
  const Eigen::Matrix3d rot = s.orientation.toRotationMatrix();
  const Eigen::Vector3d omega =
      rot * model.inertia_body.inverse() * rot.transpose() * next.ang_momentum;
  next.orientation = (quat_exp(dt * omega) * s.orientation).normalized();
  return next;
}

SeedResult seed_trajectory(const BodyPose& start, const BodyPose& goal,
                           const std::vector<int>& anchor_ids, const Environment& env,
                           const RobotModel& model, const ScpConfig& cfg) {
  SeedResult out;
  const double dist = (goal.position - start.position).norm();
  const double ang = quat_error(start.orientation, goal.orientation).norm();
  const int steps = static_cast<int>(std::ceil(std::max(dist / cfg.seed_spacing, ang / 0.2)));
  const int n = steps + 1;
  const double max_spacing = 4.0 * cfg.seed_spacing;
  CounterRng rng(cfg.seed ^ 0x5eedULL);
  for (int k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
    BodyPose wp;
    wp.position = (1.0 - t) * start.position + t * goal.position;
    wp.orientation = start.orientation.slerp(t, goal.orientation);
    auto acceptable = [&](const BodyPose& p) {
      if (!out.waypoints.empty() &&
          (p.position - out.waypoints.back().position).norm() > max_spacing)
        return false;
      return pose_feasible(model, p, anchor_ids, env).ok;
    };
    if (!acceptable(wp)) {
      bool found = false;
      for (int attempt = 0; attempt < cfg.seed_budget; ++attempt) {
        // Widen the search as attempts fail.
        const double sigma =
            0.1 + 0.4 * static_cast<double>(attempt) / std::max(1, cfg.seed_budget);
        BodyPose p = wp;
        p.position += sigma * Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
        if (acceptable(p)) {
          wp = p;
          found = true;
          break;
        }
      }
      if (!found) return out;  // budget exhausted
    }
    out.waypoints.push_back(wp);
  }
  out.ok = true;
  return out;
}

namespace {

struct ScpProblem {
  const RobotModel* model = nullptr;
  const Environment* env = nullptr;
  ContactContext ctx;
  std::vector<Eigen::Vector3d> gripper_path;  // per state, optional
  StateVector goal_state;
  double dt = 0.5;
  // End-effector phases softly pin the body to the held stance pose.
  double hold_weight = 0.0;

  const Eigen::Vector3d* gripper_at(int k) const {
    return gripper_path.empty() ? nullptr : &gripper_path[k];
  }

  StateVector step(const StateVector& s, const Eigen::VectorXd& tau, int k) const {
    return nonlinear_step(s, tau, dt, ctx, *model, gripper_at(k));
  }
};

// Joint vector of all attached booms at a pose: (extension, pan, tilt) each.
void joint_vector(const RobotModel& model, const ContactContext& ctx, const BodyPose& pose,
                  Eigen::VectorXd* theta) {
  std::vector<double> vals;
  for (int i = 0; i < model.boom_count(); ++i) {
    if (!ctx.attached[i]) continue;
    IkResult ik = inverse_joint_solve(model, pose, ctx.anchors[i], i);
    vals.push_back(ik.joints.extension);
    vals.push_back(ik.joints.pan);
    vals.push_back(ik.joints.tilt);
  }
  *theta = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

bool joints_within_limits(const RobotModel& model, const ContactContext& ctx,
                          const BodyPose& pose, const Eigen::Vector3d* gripper) {
  for (int i = 0; i < model.boom_count(); ++i) {
    Eigen::Vector3d target;
    if (ctx.attached[i]) {
      target = ctx.anchors[i];
    } else if (ctx.detached_boom && *ctx.detached_boom == i && gripper) {
      target = *gripper;
    } else {
      continue;
    }
    if (!inverse_joint_solve(model, pose, target, i).ok()) return false;
  }
  return true;
}

struct LinearizedStep {
  Eigen::Matrix<double, kErrDim, kErrDim> a;
  Eigen::MatrixXd b;                      // kErrDim x m
  Eigen::Matrix<double, kErrDim, 1> d;    // defect
};

LinearizedStep linearize(const ScpProblem& prob, const StateVector& s_ref,
                         const Eigen::VectorXd& tau_ref, const StateVector& s_next_ref, int k,
                         double h) {
  LinearizedStep lin;
  const int m = static_cast<int>(tau_ref.size());
  lin.b.resize(kErrDim, m);
  lin.d = state_error(s_next_ref, prob.step(s_ref, tau_ref, k));
  for (int i = 0; i < kErrDim; ++i) {
    Eigen::Matrix<double, kErrDim, 1> dz = Eigen::Matrix<double, kErrDim, 1>::Zero();
    dz(i) = h;
    const auto plus = state_error(s_next_ref, prob.step(state_retract(s_ref, dz), tau_ref, k));
    dz(i) = -h;
    const auto minus = state_error(s_next_ref, prob.step(state_retract(s_ref, dz), tau_ref, k));
    lin.a.col(i) = (plus - minus) / (2.0 * h);
  }
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd dtau = tau_ref;
    dtau(i) += h;
    const auto plus = state_error(s_next_ref, prob.step(s_ref, dtau, k));
    dtau(i) = tau_ref(i) - h;
    const auto minus = state_error(s_next_ref, prob.step(s_ref, dtau, k));
    lin.b.col(i) = (plus - minus) / (2.0 * h);
  }
  return lin;
}

double reported_objective(const std::vector<Eigen::VectorXd>& taus,
                          const std::vector<StateVector>& states,
                          const std::vector<Eigen::VectorXd>& prev_taus,
                          const std::vector<StateVector>& prev_states, double lam_s,
                          double lam_tau) {
  double j = 0.0;
  for (const auto& t : taus) j += t.norm();
  for (size_t k = 0; k < taus.size(); ++k) j += lam_tau * (taus[k] - prev_taus[k]).norm();
  for (size_t k = 0; k < states.size(); ++k)
    j += lam_s * state_error(prev_states[k], states[k]).norm();
  return j;
}

ScpResult scp_core(const ScpProblem& prob, std::vector<StateVector> states,
                   std::vector<Eigen::VectorXd> controls, const ScpConfig& cfg,
                   Trajectory traj_template) {
  ScpResult res;
  const RobotModel& model = *prob.model;
  const int n = static_cast<int>(states.size());
  const int m = static_cast<int>(controls.empty() ? 0 : controls[0].size());
  // Variables: error states z_2..z_n stacked first, then controls u_1..u_{n-1}.
  // Keeping the states explicit leaves the dynamics as well-scaled equality
  // rows instead of condensing unstable step products into the Hessian.
  const int nz = kErrDim * (n - 1);
  const int nv = nz + m * (n - 1);
  const JointLimits& jl = model.joint_limits;
  const ActuationLimits& al = model.actuation_limits;
  auto zoff = [](int k) { return kErrDim * (k - 1); };  // state index k in [1, n-1]
  auto uoff = [nz, m](int k) { return nz + m * k; };    // control index k in [0, n-2]

  double lam_s = cfg.lambda_state;
  double lam_tau = cfg.lambda_control;
  double prev_objective = std::numeric_limits<double>::infinity();

  std::vector<LinearizedStep> lins(n - 1);

  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    for (int k = 0; k < n - 1; ++k)
      lins[k] = linearize(prob, states[k], controls[k], states[k + 1], k, cfg.fd_step);

    // Diagonal quadratic objective: control effort, trust penalties, and a
    // mild quasi-static damping of the momentum channels.
    Eigen::VectorXd gdiag(nv);
    Eigen::VectorXd g0 = Eigen::VectorXd::Zero(nv);
    for (int k = 1; k < n; ++k) {
      for (int c = 0; c < kErrDim; ++c) {
        double w = lam_s;
        if (c >= 6 && c < 9) w += cfg.damping_lin;
        if (c >= 9) w += cfg.damping_ang;
        gdiag(zoff(k) + c) = 2.0 * w;
      }
      g0.segment<3>(zoff(k) + 6) = 2.0 * cfg.damping_lin * states[k].lin_momentum;
      g0.segment<3>(zoff(k) + 9) = 2.0 * cfg.damping_ang * states[k].ang_momentum;
      if (prob.hold_weight > 0.0) {
        gdiag.segment<6>(zoff(k)).array() += 2.0 * prob.hold_weight;
        g0.segment<3>(zoff(k)) +=
            2.0 * prob.hold_weight * (states[k].position - prob.goal_state.position);
        g0.segment<3>(zoff(k) + 3) +=
            2.0 * prob.hold_weight *
            quat_error(prob.goal_state.orientation, states[k].orientation);
      }
    }
    for (int k = 0; k < n - 1; ++k) {
      gdiag.segment(uoff(k), m).setConstant(2.0 * (1.0 + lam_tau));
      g0.segment(uoff(k), m) = 2.0 * controls[k];
    }
    const Eigen::MatrixXd g = gdiag.asDiagonal();

    // Equalities: the linearized dynamics chain plus the boundary state.
    const Eigen::Matrix<double, kErrDim, 1> z_goal = state_error(states[n - 1], prob.goal_state);
    const int n_eq = kErrDim * (n - 1) + kErrDim;
    Eigen::MatrixXd ce = Eigen::MatrixXd::Zero(nv, n_eq);
    Eigen::VectorXd ce0(n_eq);
    int col = 0;
    for (int k = 0; k < n - 1; ++k) {
      for (int r = 0; r < kErrDim; ++r, ++col) {
        ce(zoff(k + 1) + r, col) = 1.0;
        if (k > 0) ce.block(zoff(k), col, kErrDim, 1) = -lins[k].a.row(r).transpose();
        ce.block(uoff(k), col, m, 1) = -lins[k].b.row(r).transpose();
        ce0(col) = -lins[k].d(r);
      }
    }
    for (int r = 0; r < kErrDim; ++r, ++col) {
      ce(zoff(n - 1) + r, col) = 1.0;
      ce0(col) = -z_goal(r);
    }

    // Re-express the equality block with orthonormal normals; single-step
    // problems make some boundary rows dependent on the dynamics rows, and
    // those are dropped here after a consistency check.
    {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ce);
      qr.setThreshold(1e-10);
      const int rank = static_cast<int>(qr.rank());
      const int mc = static_cast<int>(ce.cols());
      const Eigen::MatrixXd q_thin = qr.householderQ() * Eigen::MatrixXd::Identity(nv, rank);
      const Eigen::MatrixXd r_full =
          qr.matrixR().topRows(rank).template triangularView<Eigen::Upper>();
      const Eigen::VectorXd ce0_perm = qr.colsPermutation().transpose() * ce0;
      const Eigen::VectorXd y = r_full.leftCols(rank)
                                    .transpose()
                                    .triangularView<Eigen::Lower>()
                                    .solve(-ce0_perm.head(rank));
      if (rank < mc) {
        const Eigen::VectorXd resid =
            r_full.rightCols(mc - rank).transpose() * y + ce0_perm.tail(mc - rank);
        if (resid.cwiseAbs().maxCoeff() > 1e-6 * (1.0 + ce0.cwiseAbs().maxCoeff())) {
          res.status = ScpStatus::kSubproblemInfeasible;
          res.diagnostics.message = "boundary constraints inconsistent";
          break;
        }
      }
      ce = q_thin;
      ce0 = -y;
    }

    // Inequalities: control box, momentum caps, joint limits near bounds.
    std::vector<Eigen::VectorXd> ci_cols;
    std::vector<double> ci_offs;
    auto push_unit = [&](int idx, double sign, double off) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
      c(idx) = sign;
      ci_cols.push_back(std::move(c));
      ci_offs.push_back(off);
    };
    for (int k = 0; k < n - 1; ++k) {
      for (int c = 0; c < m; ++c) {
        const bool is_force = c % 3 == 0;
        const double lo = is_force ? std::max(al.force_min, model.min_tension) : al.moment_min;
        const double hi = is_force ? al.force_max : al.moment_max;
        push_unit(uoff(k) + c, 1.0, controls[k](c) - lo);
        push_unit(uoff(k) + c, -1.0, hi - controls[k](c));
      }
    }
    const double p_max = model.mass_body * cfg.max_speed;
    const double l_max = model.inertia_body.diagonal().minCoeff() * cfg.max_omega;
    for (int k = 1; k + 1 < n; ++k) {
      for (int c = 0; c < 6; ++c) {
        const double cap = c < 3 ? p_max : l_max;
        const double ref = c < 3 ? states[k].lin_momentum(c) : states[k].ang_momentum(c - 3);
        push_unit(zoff(k) + 6 + c, 1.0, ref + cap);
        push_unit(zoff(k) + 6 + c, -1.0, cap - ref);
      }
      if (prob.hold_weight > 0.0) {
        // An end-effector phase keeps the body at the held stance pose.
        const Eigen::Vector3d dp = states[k].position - prob.goal_state.position;
        const Eigen::Vector3d dr =
            quat_error(prob.goal_state.orientation, states[k].orientation);
        for (int c = 0; c < 3; ++c) {
          push_unit(zoff(k) + c, 1.0, cfg.hold_pos_cap + dp(c));
          push_unit(zoff(k) + c, -1.0, cfg.hold_pos_cap - dp(c));
          push_unit(zoff(k) + 3 + c, 1.0, cfg.hold_rot_cap + dr(c));
          push_unit(zoff(k) + 3 + c, -1.0, cfg.hold_rot_cap - dr(c));
        }
      }
    }
    const double margin_ext = 0.75, margin_ang = 0.35;
    for (int k = 1; k < n; ++k) {
      Eigen::VectorXd theta;
      joint_vector(model, prob.ctx, states[k].pose(), &theta);
      const int nj = static_cast<int>(theta.size());
      Eigen::MatrixXd jac(nj, 6);
      for (int c = 0; c < 6; ++c) {
        Eigen::Matrix<double, kErrDim, 1> dz = Eigen::Matrix<double, kErrDim, 1>::Zero();
        dz(c) = cfg.fd_step;
        Eigen::VectorXd tp, tm;
        joint_vector(model, prob.ctx, state_retract(states[k], dz).pose(), &tp);
        dz(c) = -cfg.fd_step;
        joint_vector(model, prob.ctx, state_retract(states[k], dz).pose(), &tm);
        jac.col(c) = (tp - tm) / (2.0 * cfg.fd_step);
      }
      for (int r = 0; r < nj; ++r) {
        const int kind = r % 3;  // extension, pan, tilt
        const double lo = kind == 0 ? jl.ext_min : (kind == 1 ? jl.pan_min : jl.tilt_min);
        const double hi = kind == 0 ? jl.ext_max : (kind == 1 ? jl.pan_max : jl.tilt_max);
        const double margin = kind == 0 ? margin_ext : margin_ang;
        if (theta(r) - lo >= margin && hi - theta(r) >= margin) continue;
        Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
        row.segment<6>(zoff(k)) = jac.row(r).transpose();
        if (theta(r) - lo < margin) {
          ci_cols.push_back(row);
          ci_offs.push_back(theta(r) - lo);
        }
        if (hi - theta(r) < margin) {
          ci_cols.push_back(-row);
          ci_offs.push_back(hi - theta(r));
        }
      }
    }
    Eigen::MatrixXd ci(nv, ci_cols.size());
    Eigen::VectorXd ci0(ci_cols.size());
    for (size_t c = 0; c < ci_cols.size(); ++c) {
      ci.col(c) = ci_cols[c];
      ci0(c) = ci_offs[c];
    }

    const QpResult qp = solve_qp(g, g0, ce, ce0, ci, ci0, 4000);
    if (qp.status != QpStatus::kOptimal) {
      res.status = ScpStatus::kSubproblemInfeasible;
      res.diagnostics.message = "qp status " + std::to_string(static_cast<int>(qp.status));
      break;
    }

    // Candidate iterate straight from the subproblem variables.
    std::vector<StateVector> new_states(n);
    std::vector<Eigen::VectorXd> new_controls(n - 1);
    new_states[0] = states[0];
    for (int k = 0; k < n - 1; ++k)
      new_controls[k] = controls[k] + qp.x.segment(uoff(k), m);
    for (int k = 1; k < n; ++k)
      new_states[k] = state_retract(states[k], qp.x.segment(zoff(k), kErrDim));

    // Exact joint-limit recheck; reject and shrink the trust region on
    // violation. Acceptance compares the reported objective at the nominal
    // trust weights so the trace stays monotone as the internal weights
    // adapt.
    bool joints_ok = true;
    for (int k = 0; k < n && joints_ok; ++k)
      joints_ok = joints_within_limits(model, prob.ctx, new_states[k].pose(),
                                       prob.gripper_at(k));
    const double objective = joints_ok
                                 ? reported_objective(new_controls, new_states, controls,
                                                      states, cfg.lambda_state,
                                                      cfg.lambda_control)
                                 : std::numeric_limits<double>::infinity();
    if (!joints_ok || objective > prev_objective + 1e-9) {
      lam_s = std::min(lam_s * 2.0, cfg.lambda_max);
      lam_tau = std::min(lam_tau * 2.0, cfg.lambda_max);
      if (lam_s >= cfg.lambda_max) {
        res.diagnostics.message = "trust region collapsed";
        break;
      }
      continue;
    }

    // Accepted.
    const double step_inf = qp.x.size() ? qp.x.cwiseAbs().maxCoeff() : 0.0;
    states = std::move(new_states);
    controls = std::move(new_controls);
    prev_objective = objective;
    res.diagnostics.objective_trace.push_back(objective);
    lam_s = std::max(lam_s * 0.5, cfg.lambda_min);
    lam_tau = std::max(lam_tau * 0.5, cfg.lambda_min);

    if (step_inf < cfg.convergence_tol) {
      ++iter;
      break;
    }
  }
  res.diagnostics.iterations = iter;

  Trajectory traj = std::move(traj_template);
  traj.dt = prob.dt;
  traj.states = states;
  traj.controls = controls;
  res.trajectory = std::move(traj);

  rollout_defects(res.trajectory, prob.ctx, model, &res.diagnostics.max_defect_pos,
                  &res.diagnostics.max_defect_rot);
  if (res.status != ScpStatus::kSubproblemInfeasible) {
    const bool boundary_ok =
        (states[n - 1].position - prob.goal_state.position).norm() < 1e-6 &&
        quat_error(states[n - 1].orientation, prob.goal_state.orientation).norm() < 1e-6;
    if (boundary_ok && res.diagnostics.max_defect_pos <= cfg.defect_tol &&
        res.diagnostics.max_defect_rot <= cfg.defect_tol) {
      res.status = ScpStatus::kConverged;
    } else {
      res.status = ScpStatus::kNotConverged;
      if (res.diagnostics.message.empty())
        res.diagnostics.message = "defect or boundary tolerance not met";
    }
  }
  return res;
}

std::vector<int> attached_list(const ContactContext& ctx) {
  std::vector<int> out;
  for (size_t i = 0; i < ctx.attached.size(); ++i)
    if (ctx.attached[i]) out.push_back(static_cast<int>(i));
  return out;
}

// Equilibrium controls for a static pose, used to warm-start every step.
bool hover_controls(const RobotModel& model, const ContactContext& ctx, const BodyPose& pose,
                    const Eigen::Vector3d* gripper, Eigen::VectorXd* tau) {
  std::vector<Eigen::Vector3d> anchors = ctx.anchors;
  if (ctx.detached_boom && gripper) anchors[*ctx.detached_boom] = *gripper;
  AllocationResult alloc = static_equilibrium_controls(model, pose, anchors, ctx.attached,
                                                       ctx.detached_boom);
  if (!alloc.ok()) return false;
  *tau = alloc.control->tau;
  return true;
}

}  // namespace

void rollout_defects(const Trajectory& traj, const ContactContext& ctx, const RobotModel& model,
                     double* max_pos, double* max_rot) {
  *max_pos = 0.0;
  *max_rot = 0.0;
  for (size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const Eigen::Vector3d* grip =
        traj.gripper_path.empty() ? nullptr : &traj.gripper_path[k];
    const StateVector pred =
        nonlinear_step(traj.states[k], traj.controls[k], traj.dt, ctx, model, grip);
    const auto err = state_error(pred, traj.states[k + 1]);
    *max_pos = std::max(*max_pos, err.segment<3>(0).norm());
    *max_rot = std::max(*max_rot, err.segment<3>(3).norm());
  }
}

ScpResult scp_solve_body(const RobotModel& model, const Environment& env,
                         const std::vector<int>& anchor_ids, const BodyPose& start,
                         const BodyPose& goal, const ScpConfig& cfg) {
  cfg.validate();
  ScpResult res;
  const SeedResult seed = seed_trajectory(start, goal, anchor_ids, env, model, cfg);
  if (!seed.ok) {
    res.status = ScpStatus::kSeedFailed;
    return res;
  }

  ScpProblem prob;
  prob.model = &model;
  prob.env = &env;
  prob.dt = cfg.dt;
  prob.ctx.attached.assign(model.boom_count(), true);
  prob.ctx.anchors.resize(model.boom_count());
  for (int i = 0; i < model.boom_count(); ++i)
    prob.ctx.anchors[i] = env.find_anchor(anchor_ids[i])->position;
  prob.goal_state = StateVector::at_rest(goal);

  std::vector<StateVector> states;
  for (const auto& wp : seed.waypoints) states.push_back(StateVector::at_rest(wp));
  if (states.size() == 1) states.push_back(states[0]);

  std::vector<Eigen::VectorXd> controls;
  for (size_t k = 0; k + 1 < states.size(); ++k) {
    Eigen::VectorXd tau;
    if (!hover_controls(model, prob.ctx, states[k].pose(), nullptr, &tau)) {
      res.status = ScpStatus::kSeedFailed;
      return res;
    }
    controls.push_back(tau);
  }

  Trajectory tmpl;
  tmpl.phase = TrajectoryPhase::kBody;
  tmpl.attached_booms = attached_list(prob.ctx);
  return scp_core(prob, std::move(states), std::move(controls), cfg, std::move(tmpl));
}

ScpResult scp_solve_end_effector(const RobotModel& model, const Environment& env,
                                 const std::vector<int>& anchor_ids, int moved_boom,
                                 const Eigen::Vector3d& from_pos, const Eigen::Vector3d& to_pos,
                                 const BodyPose& hold_pose, const ScpConfig& cfg) {
  cfg.validate();
  ScpResult res;

  ScpProblem prob;
  prob.model = &model;
  prob.env = &env;
  prob.dt = cfg.dt;
  prob.ctx.attached.assign(model.boom_count(), true);
  prob.ctx.attached[moved_boom] = false;
  prob.ctx.detached_boom = moved_boom;
  prob.ctx.anchors.resize(model.boom_count());
  for (int i = 0; i < model.boom_count(); ++i)
    prob.ctx.anchors[i] = env.find_anchor(anchor_ids[i])->position;
  prob.goal_state = StateVector::at_rest(hold_pose);
  prob.hold_weight = cfg.hold_pose_weight;

  const double travel = (to_pos - from_pos).norm();
  const int n = std::max(2, static_cast<int>(std::ceil(travel / cfg.seed_spacing)) + 1);

  // Straight-line gripper path with local perturbation on collision.
  CounterRng rng(cfg.seed ^ 0x9817ULL);
  std::vector<Eigen::Vector3d> path(n);
  const JointState base_joints = [&] {
    JointState js(model.boom_count());
    for (int i = 0; i < model.boom_count(); ++i)
      js[i] = inverse_joint_solve(model, hold_pose, prob.ctx.anchors[i], i).joints;
    return js;
  }();
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / (n - 1);
    Eigen::Vector3d p = (1.0 - t) * from_pos + t * to_pos;
    auto path_ok = [&](const Eigen::Vector3d& cand) {
      IkResult ik = inverse_joint_solve(model, hold_pose, cand, moved_boom);
      if (!ik.ok()) return false;
      JointState js = base_joints;
      js[moved_boom] = ik.joints;
      return !collision_check(model, hold_pose, js, env);
    };
    if (!path_ok(p)) {
      bool found = false;
      for (int attempt = 0; attempt < cfg.seed_budget; ++attempt) {
        Eigen::Vector3d cand =
            p + 0.1 * Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
        if (k == 0 || k == n - 1) break;  // endpoints are fixed
        if (path_ok(cand)) {
          p = cand;
          found = true;
          break;
        }
      }
      if (!found && k != 0 && k != n - 1) {
        res.status = ScpStatus::kSeedFailed;
        return res;
      }
      if ((k == 0 || k == n - 1) && !path_ok(p)) {
        res.status = ScpStatus::kSeedFailed;
        return res;
      }
    }
    path[k] = p;
  }
  prob.gripper_path = path;

  std::vector<StateVector> states(n, StateVector::at_rest(hold_pose));
  std::vector<Eigen::VectorXd> controls;
  for (int k = 0; k + 1 < n; ++k) {
    Eigen::VectorXd tau;
    if (!hover_controls(model, prob.ctx, hold_pose, &path[k], &tau)) {
      res.status = ScpStatus::kSeedFailed;
      return res;
    }
    controls.push_back(tau);
  }

  Trajectory tmpl;
  tmpl.phase = TrajectoryPhase::kEndEffector;
  tmpl.moved_boom = moved_boom;
  tmpl.gripper_path = path;
  tmpl.attached_booms = attached_list(prob.ctx);
  return scp_core(prob, std::move(states), std::move(controls), cfg, std::move(tmpl));
}

}  // namespace climb
