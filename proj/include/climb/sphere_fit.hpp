#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "climb/pointcloud.hpp"

namespace climb {

struct SphereCandidate {
  int id = 0;
  Eigen::Vector3d center{0, 0, 0};
  double radius = 0.0;
  int inlier_count = 0;
  double inlier_fraction = 0.0;
};

struct MsacConfig {
  double d_max = 0.005;        // m, inlier band and truncation distance
  int iterations = 2000;       // hypotheses per extraction round
  double r_min = 0.075;        // m, emitted-candidate radius window
  double r_max = 0.200;        // m
  int max_candidates = 5;      // extraction rounds
  double min_inlier_fraction = 0.15;  // of the remaining points
  std::uint64_t seed = 0;
};

struct DegenerateSamplesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact sphere through four points (determinant formulation). Returns
// nothing when the points are near-coplanar.
std::optional<std::pair<Eigen::Vector3d, double>> sphere_through(
    const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
    const Eigen::Vector3d& d);

// Sequential MSAC extraction: best-scoring sphere per round, least-squares
// refined on its inliers, removed from the working set, kept only if the
// radius lands inside the window.
std::vector<SphereCandidate> msac_sphere_fit(const PointCloud& pc, const MsacConfig& cfg);

}  // namespace climb
