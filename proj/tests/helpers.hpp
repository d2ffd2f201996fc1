#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "climb/feasibility.hpp"
#include "climb/rng.hpp"
#include "climb/robot_model.hpp"

namespace climb::testutil {

// Cylindrical tunnel of radius 2 m along x with eight anchors matched to the
// default shoulder layout: side anchors 45 degrees up the walls, overhead
// anchors on the ceiling.
struct TunnelFixture {
  RobotModel model = RobotModel::default_model();
  Environment env;
  std::vector<int> stance;  // anchor id per boom

  explicit TunnelFixture(double radius = 2.0) {
    env.tunnel = TunnelGeometry{{0, 0, 0}, {1, 0, 0}, radius};
    const double c45 = std::sqrt(0.5);
    for (int i = 0; i < 8; ++i) {
      const Eigen::Vector3d s = model.shoulders[i].position_body;
      Eigen::Vector3d dir;
      if (i < 3) dir = Eigen::Vector3d(0, c45, c45);        // left wall, 45 deg up
      else if (i < 6) dir = Eigen::Vector3d(0, -c45, c45);  // right wall
      else if (i == 6) dir = Eigen::Vector3d(c45, 0, c45);  // ceiling, ahead
      else dir = Eigen::Vector3d(-c45, 0, c45);             // ceiling, behind
      // Push out to the wall radius.
      double t_hi = 10.0, t_lo = 0.0;
      for (int it = 0; it < 60; ++it) {
        const double t = 0.5 * (t_hi + t_lo);
        const Eigen::Vector3d p = s + t * dir;
        (Eigen::Vector2d(p.y(), p.z()).norm() < radius ? t_lo : t_hi) = t;
      }
      Anchor a;
      a.id = i;
      a.position = s + t_lo * dir;
      env.anchors.push_back(a);
      stance.push_back(i);
    }
  }
};

inline BodyPose random_pose(CounterRng& rng, double pos_scale = 1.0) {
  BodyPose p;
  p.position = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian()) * pos_scale;
  Eigen::Vector3d axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
  if (axis.norm() < 1e-9) axis = Eigen::Vector3d::UnitX();
  p.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(rng.uniform(0, 3.0), axis.normalized()));
  return p;
}

}  // namespace climb::testutil
