#include "climb/grasp_sites.hpp"

#include <algorithm>

namespace climb {

std::vector<GraspSite> rank_grasp_sites(const std::vector<SphereCandidate>& candidates,
                                        const GraspScenario& gripper,
                                        const SiteRankingConfig& cfg) {
  std::vector<GraspSite> sites;
  sites.reserve(candidates.size());
  for (const auto& cand : candidates) {
    GraspSite site;
    site.candidate = cand;
    site.alpha = alpha_from_ratio(cfg.link_length / cand.radius);
    site.within_window = site.alpha >= cfg.alpha_min && site.alpha <= cfg.alpha_max;
    if (site.within_window) {
      GraspScenario scn = gripper;
      scn.alpha = {site.alpha, site.alpha, site.alpha};
      scn.rock_radius = cand.radius;
      const LimitSurface ls = build_limit_surface(scn, cfg.mc);
      site.score = query(ls, cfg.preferred_dir, cfg.stat);
    }
    sites.push_back(site);
  }
  std::stable_sort(sites.begin(), sites.end(), [](const GraspSite& a, const GraspSite& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.candidate.id < b.candidate.id;
  });
  return sites;
}

}  // namespace climb
