#pragma once

#include <vector>

#include "climb/limit_surface.hpp"
#include "climb/sphere_fit.hpp"

namespace climb {

struct GraspSite {
  SphereCandidate candidate;
  double alpha = 0.0;       // rad, from the link/rock closure
  bool within_window = true;
  double score = 0.0;       // queried pull force at the preferred direction
};

struct SiteRankingConfig {
  double link_length = 0.060;  // m
  double alpha_min = 25.0 * 3.14159265358979323846 / 180.0;
  double alpha_max = 85.0 * 3.14159265358979323846 / 180.0;
  PullDirection preferred_dir{0.0, 0.0};
  SurfaceStat stat = SurfaceStat::kP5;
  MonteCarloConfig mc;  // per-candidate evaluation budget
};

// Evaluates a limit surface per candidate (alpha from the geometric closure
// of link length and fitted radius) and orders by the queried pull force at
// the preferred direction. Candidates outside the alpha window score zero.
// Ties break on the candidate id.
std::vector<GraspSite> rank_grasp_sites(const std::vector<SphereCandidate>& candidates,
                                        const GraspScenario& gripper,
                                        const SiteRankingConfig& cfg);

}  // namespace climb
