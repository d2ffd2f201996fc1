#include "climb/limit_surface.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "climb/rng.hpp"

namespace climb {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPhiPeriod = 2.0 * kPi / 3.0;

void percentile_pair(std::vector<double> sorted, double* p5, double* p50) {
  std::sort(sorted.begin(), sorted.end());
  auto pick = [&sorted](double p) {
    const double rank = p / 100.0 * (sorted.size() - 1);
    const size_t lo = static_cast<size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return (1.0 - frac) * sorted[lo] + frac * sorted[lo + 1];
  };
  *p5 = pick(5.0);
  *p50 = pick(50.0);
}

// Per-draw trigonometry, fixed while the force ramps up.
struct SpineTrig {
  double cp, sp;  // cos/sin of psi
  double ca, sa;  // cos/sin of alpha + psi
};

struct DrawCache {
  std::array<std::vector<SpineTrig>, 3> fingers;
  std::vector<char> active;   // scratch, sized to the largest finger
  std::vector<double> shear;  // scratch

  void fill(const GraspScenario& scn, const std::vector<double>& psi_draw) {
    size_t k = 0;
    size_t max_n = 0;
    for (int j = 0; j < 3; ++j) {
      const int n = scn.spines_per_finger[j];
      max_n = std::max(max_n, static_cast<size_t>(n));
      fingers[j].resize(n);
      for (int i = 0; i < n; ++i, ++k) {
        const double psi = psi_draw[k];
        fingers[j][i] = {std::cos(psi), std::sin(psi), std::cos(scn.alpha[j] + psi),
                         std::sin(scn.alpha[j] + psi)};
      }
    }
    active.resize(max_n);
    shear.resize(max_n);
  }
};

// Failure test for one finger at pull force f, given the per-unit-pull
// fingertip forces. Spine shedding only feeds back through the strength
// threshold: the slip and contact-loss tests are invariant to how the
// fingertip load divides among the active spines.
bool finger_fails(const GraspScenario& scn, int finger, const Eigen::Matrix<double, 9, 1>& unit,
                  DrawCache& cache, double f) {
  const double fn = f * unit(3 * finger + 0);
  const double ft = f * unit(3 * finger + 1);
  const double fc = f * unit(3 * finger + 2);
  const double f_int = scn.internal_force;

  // Lift-off: the grasp preload no longer holds the fingertip down.
  if (fn + f_int * std::sin(scn.alpha[finger]) <= 0.0) return true;

  const auto& spines = cache.fingers[finger];
  const int n = static_cast<int>(spines.size());
  int n_active = 0;
  const double fc2 = fc * fc;
  for (int i = 0; i < n; ++i) {
    const SpineTrig& t = spines[i];
    const double sx = ft * t.cp - fn * t.sp + f_int * t.ca;
    const double sz = ft * t.sp + fn * t.cp + f_int * t.sa;
    const double sh2 = sx * sx + fc2;
    if (sz <= 0.0 || sh2 > scn.friction * scn.friction * sz * sz) {
      cache.active[i] = 0;  // unloaded or slipped
      continue;
    }
    cache.active[i] = 1;
    cache.shear[i] = std::sqrt(sh2);
    ++n_active;
  }
  // Redistribute onto the survivors until the strength test settles.
  bool shed = true;
  while (shed && n_active > 0) {
    shed = false;
    for (int i = 0; i < n; ++i) {
      if (!cache.active[i]) continue;
      if (cache.shear[i] / n_active > scn.spine_strength) {
        cache.active[i] = 0;
        --n_active;
        shed = true;
      }
    }
  }
  return n_active == 0;
}

bool grasp_fails(const GraspScenario& scn, const Eigen::Matrix<double, 9, 1>& unit,
                 DrawCache& cache, double f) {
  for (int finger = 0; finger < 3; ++finger)
    if (finger_fails(scn, finger, unit, cache, f)) return true;
  return false;
}

PullSample max_pull_from_cache(const GraspScenario& scn,
                               const Eigen::Matrix<double, 9, 1>& unit, DrawCache& cache,
                               const MonteCarloConfig& cfg) {
  double lo = 0.0;
  double hi = -1.0;
  for (double f = cfg.force_step; f < cfg.force_cap; f += cfg.force_step) {
    if (grasp_fails(scn, unit, cache, f)) {
      hi = f;
      break;
    }
    lo = f;
  }
  if (hi < 0.0) {
    if (grasp_fails(scn, unit, cache, cfg.force_cap)) {
      hi = cfg.force_cap;
    } else {
      return {cfg.force_cap, true};
    }
  }
  while (hi - lo > cfg.refine_resolution) {
    const double mid = 0.5 * (lo + hi);
    (grasp_fails(scn, unit, cache, mid) ? hi : lo) = mid;
  }
  return {hi, false};
}

}  // namespace

void MonteCarloConfig::validate() const {
  if (n_grid < 2) throw std::invalid_argument("mc: n_grid must be >= 2");
  if (n_mc < 1) throw std::invalid_argument("mc: n_mc must be >= 1");
  if (force_step <= 0) throw std::invalid_argument("mc: force_step must be > 0");
  if (force_cap <= force_step) throw std::invalid_argument("mc: force_cap too small");
}

PullSample sample_max_pull(const GraspScenario& scn, const PullDirection& dir,
                           const std::vector<double>& psi_draw, const MonteCarloConfig& cfg) {
  if (psi_draw.size() != static_cast<size_t>(scn.total_spines()))
    throw std::invalid_argument("sample_max_pull: psi draw must cover every spine");
  const ContactForces unit = solve_contact_forces(scn, dir, 1.0);
  DrawCache cache;
  cache.fill(scn, psi_draw);
  return max_pull_from_cache(scn, unit.f, cache, cfg);
}

LimitSurface build_limit_surface(const GraspScenario& scn, const MonteCarloConfig& cfg) {
  scn.validate();
  cfg.validate();
  LimitSurface ls;
  ls.n_grid = cfg.n_grid;
  ls.beta_nodes.resize(cfg.n_grid);
  ls.phi_nodes.resize(cfg.n_grid);
  for (int i = 0; i < cfg.n_grid; ++i) {
    ls.beta_nodes[i] = 0.5 * kPi * i / (cfg.n_grid - 1);
    ls.phi_nodes[i] = kPhiPeriod * i / (cfg.n_grid - 1);
  }
  ls.cells.resize(static_cast<size_t>(cfg.n_grid) * cfg.n_grid);

  auto run_cell = [&](int i, int j, DrawCache& cache) {
    const PullDirection dir{ls.beta_nodes[i], ls.phi_nodes[j]};
    const ContactForces unit = solve_contact_forces(scn, dir, 1.0);
    // The last phi column reuses the first column's draws, rotated by one
    // finger to track the cyclic 2*pi/3 symmetry, so the stored surface is
    // exactly periodic for a symmetric grasp.
    const int j_canon = j % (cfg.n_grid - 1);
    const bool wrapped = j == cfg.n_grid - 1;
    std::vector<double> forces(cfg.n_mc);
    std::vector<double> psi(static_cast<size_t>(scn.total_spines()));
    LimitSurfaceCell& cell = ls.at(i, j);
    for (int s = 0; s < cfg.n_mc; ++s) {
      size_t k = 0;
      for (int f = 0; f < 3; ++f) {
        const int slot = wrapped ? (f + 2) % 3 : f;
        CounterRng rng = CounterRng::substream(
            cfg.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j_canon),
            static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(slot));
        for (int p = 0; p < scn.spines_per_finger[f]; ++p)
          psi[k++] = rng.uniform(0.0, 0.5 * kPi);
      }
      cache.fill(scn, psi);
      const PullSample ps = max_pull_from_cache(scn, unit.f, cache, cfg);
      forces[s] = ps.force;
      if (ps.capped) ++cell.n_capped;
    }
    double sum = 0.0;
    for (double f : forces) sum += f;
    cell.mean = sum / cfg.n_mc;
    double var = 0.0;
    for (double f : forces) var += (f - cell.mean) * (f - cell.mean);
    cell.std_dev = std::sqrt(var / cfg.n_mc);
    cell.n_samples = cfg.n_mc;
    percentile_pair(forces, &cell.p5, &cell.p50);
  };

  const int total = cfg.n_grid * cfg.n_grid;
  const int workers = std::max(1, std::min(cfg.threads, total));
  if (workers == 1) {
    DrawCache cache;
    for (int k = 0; k < total; ++k) run_cell(k / cfg.n_grid, k % cfg.n_grid, cache);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        DrawCache cache;
        for (int k = next.fetch_add(1); k < total; k = next.fetch_add(1))
          run_cell(k / cfg.n_grid, k % cfg.n_grid, cache);
      });
    }
    for (auto& th : pool) th.join();
  }
  return ls;
}

double query(const LimitSurface& ls, const PullDirection& dir, SurfaceStat stat) {
  const int n = ls.n_grid;
  double beta = std::clamp(dir.beta, 0.0, 0.5 * kPi);
  double phi = std::fmod(dir.phi, kPhiPeriod);
  if (phi < 0.0) phi += kPhiPeriod;

  const double bi = beta / (0.5 * kPi) * (n - 1);
  const double pj = phi / kPhiPeriod * (n - 1);
  const int i0 = std::min(static_cast<int>(bi), n - 2);
  const int j0 = std::min(static_cast<int>(pj), n - 2);
  const double fb = bi - i0;
  const double fp = pj - j0;

  auto value = [&ls, stat](int i, int j) {
    const LimitSurfaceCell& c = ls.at(i, j);
    switch (stat) {
      case SurfaceStat::kMean: return c.mean;
      case SurfaceStat::kStd: return c.std_dev;
      case SurfaceStat::kP5: return c.p5;
      case SurfaceStat::kP50: return c.p50;
    }
    return c.mean;
  };
  return (1 - fb) * (1 - fp) * value(i0, j0) + fb * (1 - fp) * value(i0 + 1, j0) +
         (1 - fb) * fp * value(i0, j0 + 1) + fb * fp * value(i0 + 1, j0 + 1);
}

std::vector<std::pair<double, double>> cross_section(const LimitSurface& ls, double phi0,
                                                     int n_points, SurfaceStat stat) {
  std::vector<std::pair<double, double>> out;
  out.reserve(n_points);
  for (int k = 0; k < n_points; ++k) {
    const double beta = -0.5 * kPi + kPi * k / (n_points - 1);
    const double phi = beta >= 0.0 ? phi0 : phi0 + kPi;
    out.emplace_back(beta, query(ls, {std::abs(beta), phi}, stat));
  }
  return out;
}

}  // namespace climb
