#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "climb/grasp_model.hpp"

namespace climb {

struct MonteCarloConfig {
  int n_grid = 15;          // nodes per axis over [0,pi/2] x [0,2pi/3]
  int n_mc = 200;           // asperity draws per grid node
  double force_step = 0.25; // N, additive schedule
  double force_cap = 100.0; // N, give up above this
  double refine_resolution = 0.01;  // N, bisection stop
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

enum class SurfaceStat { kMean, kStd, kP5, kP50 };

struct LimitSurfaceCell {
  double mean = 0.0;
  double std_dev = 0.0;
  double p5 = 0.0;
  double p50 = 0.0;
  int n_samples = 0;
  int n_capped = 0;  // samples that never failed below the force cap
};

struct LimitSurface {
  int n_grid = 0;
  std::vector<double> beta_nodes;
  std::vector<double> phi_nodes;
  std::vector<LimitSurfaceCell> cells;  // row-major, beta index major

  const LimitSurfaceCell& at(int i_beta, int j_phi) const {
    return cells[static_cast<size_t>(i_beta) * n_grid + j_phi];
  }
  LimitSurfaceCell& at(int i_beta, int j_phi) {
    return cells[static_cast<size_t>(i_beta) * n_grid + j_phi];
  }
};

struct PullSample {
  double force = 0.0;
  bool capped = false;  // no failure below the force cap
};

// Largest sustainable pull along `dir` for one asperity draw (3*n_spines
// angles, finger-major). The draw is never resampled while spines shed load.
PullSample sample_max_pull(const GraspScenario& scn, const PullDirection& dir,
                           const std::vector<double>& psi_draw,
                           const MonteCarloConfig& cfg = {});

LimitSurface build_limit_surface(const GraspScenario& scn, const MonteCarloConfig& cfg);

// Bilinear interpolation; phi wraps with the 2*pi/3 grasp symmetry.
double query(const LimitSurface& ls, const PullDirection& dir,
             SurfaceStat stat = SurfaceStat::kMean);

// Polar section through the half-planes phi0 and phi0+pi, beta in
// [-pi/2, pi/2]. Returns (beta, force) pairs.
std::vector<std::pair<double, double>> cross_section(const LimitSurface& ls, double phi0,
                                                     int n_points = 91,
                                                     SurfaceStat stat = SurfaceStat::kMean);

}  // namespace climb
