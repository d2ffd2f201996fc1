#include <doctest.h>

#include "climb/rng.hpp"
#include "climb/tension.hpp"
#include "helpers.hpp"

using namespace climb;

namespace {

// Synthetic grasp map: unit pull directions with zero moment arms plus
// orthogonal reaction columns, mimicking booms mounted at the COM.
Eigen::MatrixXd urchin_gmap(const std::vector<Eigen::Vector3d>& dirs, double extension) {
  Eigen::MatrixXd g(6, 3 * dirs.size());
  g.setZero();
  for (size_t i = 0; i < dirs.size(); ++i) {
    const Eigen::Vector3d d = dirs[i].normalized();
    Eigen::Vector3d aux = std::abs(d.z()) < 0.9 ? Eigen::Vector3d::UnitZ()
                                                : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d e1 = d.cross(aux).normalized();
    const Eigen::Vector3d e2 = d.cross(e1);
    g.block<3, 1>(0, 3 * i + 0) = d;
    g.block<3, 1>(0, 3 * i + 1) = e1 / extension;
    g.block<3, 1>(0, 3 * i + 2) = e2 / extension;
  }
  return g;
}

std::vector<Eigen::Vector3d> opposing_pairs8() {
  std::vector<Eigen::Vector3d> dirs;
  const double s = std::sqrt(0.5);
  dirs.push_back({1, 0, 0});
  dirs.push_back({-1, 0, 0});
  dirs.push_back({0, 1, 0});
  dirs.push_back({0, -1, 0});
  dirs.push_back({0, s, s});
  dirs.push_back({0, -s, -s});
  dirs.push_back({0, -s, s});
  dirs.push_back({0, s, -s});
  return dirs;
}

}  // namespace

TEST_CASE("nullspace dimension follows the rank count") {
  testutil::TunnelFixture fx;
  BodyPose pose;
  JointState js(8);
  for (int i = 0; i < 8; ++i)
    js[i] = inverse_joint_solve(fx.model, pose, fx.env.anchors[i].position, i).joints;

  std::vector<bool> all(8, true);
  const Eigen::MatrixXd g8 = grasp_map(fx.model, pose, js, all);
  const Eigen::MatrixXd n8 = nullspace_basis(g8);
  CHECK(n8.cols() == 18);  // 24 controls - 6 wrench rows
  CHECK((g8 * n8).cwiseAbs().maxCoeff() < 1e-10);

  // Two booms with skew axes and anchors: six independent wrench columns.
  js[0] = inverse_joint_solve(fx.model, pose, Eigen::Vector3d(0.7, 1.9, 0.6), 0).joints;
  js[6] = inverse_joint_solve(fx.model, pose, Eigen::Vector3d(1.3, -0.4, 1.7), 6).joints;
  std::vector<bool> two(8, false);
  two[0] = two[6] = true;
  const Eigen::MatrixXd g2 = grasp_map(fx.model, pose, js, two);
  CHECK(nullspace_basis(g2).cols() == 0);
}

TEST_CASE("nullspace vectors annihilate random maps and stay orthonormal") {
  CounterRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd g(6, 24);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 24; ++c) g(r, c) = rng.gaussian();
    const Eigen::MatrixXd n = nullspace_basis(g);
    CHECK(n.cols() == 18);
    CHECK((g * n).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((n.transpose() * n - Eigen::MatrixXd::Identity(n.cols(), n.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
}

TEST_CASE("zero wrench on opposing booms settles at minimal equal tension") {
  const Eigen::MatrixXd g = urchin_gmap(opposing_pairs8(), 3.0);
  ActuationLimits lim;
  AllocateOptions opt;
  opt.min_tension = 1.0;
  AllocationResult res = allocate_wrench(g, Wrench{}, lim, opt);
  REQUIRE(res.ok());
  for (int k = 0; k < 8; ++k) {
    CHECK(res.control->prismatic(k) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.control->pan_moment(k) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(res.control->tilt_moment(k) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("gravity compensation exists in the tunnel stance") {
  testutil::TunnelFixture fx;
  BodyPose pose;
  std::vector<Eigen::Vector3d> anchors;
  for (const auto& a : fx.env.anchors) anchors.push_back(a.position);
  std::vector<bool> att(8, true);
  AllocationResult res = static_equilibrium_controls(fx.model, pose, anchors, att);
  REQUIRE(res.ok());

  JointState js(8);
  for (int i = 0; i < 8; ++i) js[i] = inverse_joint_solve(fx.model, pose, anchors[i], i).joints;
  const Eigen::MatrixXd g = grasp_map(fx.model, pose, js, att);
  const Eigen::Matrix<double, 6, 1> w = g * res.control->tau;
  // Total upward force equals the body weight from Table-default masses.
  CHECK(w(2) == doctest::Approx(10.0 * 3.721).epsilon(1e-6));
  CHECK(w.head<2>().norm() < 1e-6);
  CHECK(w.tail<3>().norm() < 1e-6);
}

TEST_CASE("lateral wrench on collinear booms is infeasible") {
  std::vector<Eigen::Vector3d> dirs = {{1, 0, 0}, {1, 0, 0}};
  const Eigen::MatrixXd g = urchin_gmap(dirs, 3.0);
  ActuationLimits lim;
  AllocateOptions opt;
  Wrench w;
  w.force = Eigen::Vector3d(0, 30, 0);
  AllocationResult res = allocate_wrench(g, w, lim, opt);
  CHECK_FALSE(res.ok());
  REQUIRE(res.failure.has_value());
  CHECK_FALSE(res.failure->violated_rows.empty());
}

TEST_CASE("equilibrium wrench accounts for a detached gripper") {
  RobotModel m = RobotModel::default_model();
  BodyPose pose;
  std::vector<Eigen::Vector3d> anchors(8, Eigen::Vector3d::Zero());

  SUBCASE("all attached cancels body weight only") {
    const Wrench w = equilibrium_wrench(m, pose, std::nullopt, anchors);
    CHECK((w.force - Eigen::Vector3d(0, 0, m.mass_body * m.gravity)).norm() < 1e-12);
    CHECK(w.moment.norm() < 1e-12);
  }

  SUBCASE("horizontal detached boom adds the cross-product moment") {
    anchors[1] = Eigen::Vector3d(5.0, 0.2, 0.0);  // 5 m along x from the COM
    const Wrench w = equilibrium_wrench(m, pose, 1, anchors);
    CHECK(w.force(2) ==
          doctest::Approx((m.mass_body + m.mass_gripper) * m.gravity).epsilon(1e-12));
    const Eigen::Vector3d arm = anchors[1] - pose.position;
    const Eigen::Vector3d expected =
        -arm.cross(Eigen::Vector3d(0, 0, -m.mass_gripper * m.gravity));
    CHECK((w.moment - expected).norm() < 1e-12);
    CHECK(w.moment.norm() ==
          doctest::Approx(m.mass_gripper * m.gravity * std::hypot(5.0, 0.2)).epsilon(1e-9));
  }

  SUBCASE("retracted detached gripper on the COM axis adds force only") {
    anchors[2] = Eigen::Vector3d::Zero();
    const Wrench w = equilibrium_wrench(m, pose, 2, anchors);
    CHECK(w.force(2) ==
          doctest::Approx((m.mass_body + m.mass_gripper) * m.gravity).epsilon(1e-12));
    CHECK(w.moment.norm() < 1e-12);
  }
}

TEST_CASE("allocation invariants on random feasible instances") {
  testutil::TunnelFixture fx;
  CounterRng rng(11);
  std::vector<Eigen::Vector3d> anchors;
  for (const auto& a : fx.env.anchors) anchors.push_back(a.position);
  std::vector<bool> att(8, true);
  BodyPose pose;
  JointState js(8);
  for (int i = 0; i < 8; ++i) js[i] = inverse_joint_solve(fx.model, pose, anchors[i], i).joints;
  const Eigen::MatrixXd g = grasp_map(fx.model, pose, js, att);
  const Eigen::MatrixXd kernel = nullspace_basis(g);
  ActuationLimits lim;
  AllocateOptions opt;
  opt.length_scale = fx.model.body_length;

  int feasible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Wrench w;
    w.force = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian()) * 5.0;
    w.force.z() += 37.0;
    w.moment = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian()) * 1.0;
    AllocationResult res = allocate_wrench(g, w, lim, opt);
    if (!res.ok()) continue;
    ++feasible;
    const Eigen::VectorXd& tau = res.control->tau;
    const Eigen::Matrix<double, 6, 1> got = g * tau;
    CHECK((got - w.stacked()).norm() <= 1e-6 * (1.0 + w.stacked().norm()));
    for (int k = 0; k < 8; ++k) {
      CHECK(tau(3 * k) >= opt.min_tension - 1e-12);
      CHECK(tau(3 * k) <= lim.force_max + 1e-9);
      CHECK(std::abs(tau(3 * k + 1)) <= lim.moment_max + 1e-9);
      CHECK(std::abs(tau(3 * k + 2)) <= lim.moment_max + 1e-9);
    }
    // Adding a kernel vector leaves the produced wrench unchanged.
    if (kernel.cols() > 0) {
      Eigen::VectorXd v = kernel.col(static_cast<int>(rng.below(kernel.cols())));
      const Eigen::Matrix<double, 6, 1> shifted = g * (tau + v);
      CHECK((shifted - got).norm() < 1e-10);
    }
    // Monotonicity: a zero tension floor keeps the instance feasible.
    AllocateOptions relaxed = opt;
    relaxed.min_tension = 0.0;
    CHECK(allocate_wrench(g, w, lim, relaxed).ok());
  }
  CHECK(feasible > 10);
}
