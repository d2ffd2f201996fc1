#include "climb/sphere_fit.hpp"

#include <algorithm>
#include <cmath>

#include "climb/rng.hpp"

namespace climb {

std::optional<std::pair<Eigen::Vector3d, double>> sphere_through(
    const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
    const Eigen::Vector3d& d) {
  // |p|^2 + D x + E y + F z + G = 0 through all four points.
  Eigen::Matrix4d m;
  Eigen::Vector4d rhs;
  const Eigen::Vector3d pts[4] = {a, b, c, d};
  for (int i = 0; i < 4; ++i) {
    m.row(i) << pts[i].x(), pts[i].y(), pts[i].z(), 1.0;
    rhs(i) = -pts[i].squaredNorm();
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  // Coplanar points have a vanishing determinant.
  const double scale = std::max({(b - a).norm(), (c - a).norm(), (d - a).norm(), 1e-12});
  if (std::abs(lu.determinant()) < 1e-9 * scale * scale * scale) return std::nullopt;
  const Eigen::Vector4d sol = lu.solve(rhs);
  const Eigen::Vector3d center = -0.5 * sol.head<3>();
  const double r2 = center.squaredNorm() - sol(3);
  if (r2 <= 0.0) return std::nullopt;
  return std::make_pair(center, std::sqrt(r2));
}

namespace {

double msac_score(const std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& center,
                  double radius, double d_max) {
  const double cap = d_max * d_max;
  double score = 0.0;
  for (const auto& p : pts) {
    const double d = (p - center).norm() - radius;
    score += std::min(d * d, cap);
  }
  return score;
}

// Linear least squares on |p|^2 + D x + E y + F z + G = 0 over the inliers.
bool ls_refine(const std::vector<Eigen::Vector3d>& pts, const std::vector<int>& inliers,
               Eigen::Vector3d* center, double* radius) {
  if (inliers.size() < 4) return false;
  Eigen::MatrixXd m(inliers.size(), 4);
  Eigen::VectorXd rhs(inliers.size());
  for (size_t i = 0; i < inliers.size(); ++i) {
    const Eigen::Vector3d& p = pts[inliers[i]];
    m.row(i) << p.x(), p.y(), p.z(), 1.0;
    rhs(i) = -p.squaredNorm();
  }
  const Eigen::Vector4d sol = (m.transpose() * m).ldlt().solve(m.transpose() * rhs);
  const Eigen::Vector3d c = -0.5 * sol.head<3>();
  const double r2 = c.squaredNorm() - sol(3);
  if (!(r2 > 0.0)) return false;
  *center = c;
  *radius = std::sqrt(r2);
  return true;
}

std::vector<int> collect_inliers(const std::vector<Eigen::Vector3d>& pts,
                                 const Eigen::Vector3d& center, double radius, double d_max) {
  std::vector<int> inliers;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (std::abs((pts[i] - center).norm() - radius) <= d_max)
      inliers.push_back(static_cast<int>(i));
  }
  return inliers;
}

}  // namespace

std::vector<SphereCandidate> msac_sphere_fit(const PointCloud& pc, const MsacConfig& cfg) {
  if (pc.size() < 4) throw std::invalid_argument("msac: need at least four points");
  std::vector<Eigen::Vector3d> work = pc.points;
  std::vector<SphereCandidate> out;
  const int min_points = std::max(4, pc.size() / 20);

  for (int round = 0; round < cfg.max_candidates; ++round) {
    if (static_cast<int>(work.size()) < std::max(4, min_points)) break;
    CounterRng rng = CounterRng::substream(cfg.seed, static_cast<std::uint64_t>(round));
    double best_score = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_center;
    double best_radius = 0.0;
    int degenerate = 0;
    for (int it = 0; it < cfg.iterations; ++it) {
      int idx[4];
      for (int k = 0; k < 4; ++k) {
        bool fresh;
        do {
          idx[k] = static_cast<int>(rng.below(work.size()));
          fresh = true;
          for (int j = 0; j < k; ++j) fresh = fresh && idx[j] != idx[k];
        } while (!fresh);
      }
      const auto fit = sphere_through(work[idx[0]], work[idx[1]], work[idx[2]], work[idx[3]]);
      if (!fit) {
        ++degenerate;
        continue;
      }
      const double score = msac_score(work, fit->first, fit->second, cfg.d_max);
      if (score < best_score) {
        best_score = score;
        best_center = fit->first;
        best_radius = fit->second;
      }
    }
    if (degenerate == cfg.iterations)
      throw DegenerateSamplesError("msac: every 4-point sample was coplanar");
    if (!std::isfinite(best_score)) break;

    // Two refinement passes tighten the radius before the window decision.
    std::vector<int> inliers = collect_inliers(work, best_center, best_radius, cfg.d_max);
    for (int pass = 0; pass < 2; ++pass) {
      if (!ls_refine(work, inliers, &best_center, &best_radius)) break;
      inliers = collect_inliers(work, best_center, best_radius, cfg.d_max);
    }
    const double frac = static_cast<double>(inliers.size()) / work.size();
    if (static_cast<int>(inliers.size()) < 4 || frac < cfg.min_inlier_fraction) break;

    if (best_radius >= cfg.r_min && best_radius <= cfg.r_max) {
      SphereCandidate cand;
      cand.id = static_cast<int>(out.size());
      cand.center = best_center;
      cand.radius = best_radius;
      cand.inlier_count = static_cast<int>(inliers.size());
      cand.inlier_fraction = frac;
      out.push_back(cand);
    }
    // Remove the model's inliers either way so the next round sees new
    // structure.
    std::vector<Eigen::Vector3d> rest;
    rest.reserve(work.size() - inliers.size());
    size_t next = 0;
    for (size_t i = 0; i < work.size(); ++i) {
      if (next < inliers.size() && static_cast<int>(i) == inliers[next]) {
        ++next;
        continue;
      }
      rest.push_back(work[i]);
    }
    work = std::move(rest);
  }
  return out;
}

}  // namespace climb
