#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "climb/grasp_sites.hpp"
#include "climb/pointcloud.hpp"
#include "climb/rng.hpp"
#include "climb/sphere_fit.hpp"

using namespace climb;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string tmp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// Upper-hemisphere samples of a sphere, optionally noisy, viewed from +z.
PointCloud sphere_patch(const Eigen::Vector3d& center, double radius, int n,
                        std::uint64_t seed, double noise_sigma = 0.0) {
  PointCloud pc;
  CounterRng rng(seed);
  pc.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();               // cos(theta) in [0,1]: top half
    const double phi = rng.uniform(0.0, 2 * kPi);
    const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
    Eigen::Vector3d p = center + radius * Eigen::Vector3d(st * std::cos(phi),
                                                          st * std::sin(phi), u);
    if (noise_sigma > 0.0) {
      p += noise_sigma *
           Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    }
    pc.points.push_back(p);
  }
  return pc;
}

void add_outliers(PointCloud* pc, int n, const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                  std::uint64_t seed) {
  CounterRng rng(seed);
  for (int i = 0; i < n; ++i) {
    pc->points.emplace_back(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()),
                            rng.uniform(lo.z(), hi.z()));
  }
}

}  // namespace

TEST_CASE("point cloud io") {
  SUBCASE("three-point csv") {
    const std::string path = tmp_file("climb_pc3.csv");
    {
      std::FILE* f = std::fopen(path.c_str(), "w");
      std::fputs("0,0,0\n1,2,3\n-1.5,0.25,9\n", f);
      std::fclose(f);
    }
    const PointCloud pc = load_point_cloud(path);
    REQUIRE(pc.size() == 3);
    CHECK((pc.points[1] - Eigen::Vector3d(1, 2, 3)).norm() == 0.0);
  }

  SUBCASE("malformed csv row reports the line number") {
    const std::string path = tmp_file("climb_bad.csv");
    {
      std::FILE* f = std::fopen(path.c_str(), "w");
      std::fputs("0,0,0\n1,nope,3\n", f);
      std::fclose(f);
    }
    try {
      load_point_cloud(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  SUBCASE("ply header mismatch is a parse error") {
    const std::string path = tmp_file("climb_bad.ply");
    {
      std::FILE* f = std::fopen(path.c_str(), "w");
      std::fputs("ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\nend_header\n",
                 f);
      std::fclose(f);
    }
    CHECK_THROWS_AS(load_point_cloud(path), ParseError);
  }

  SUBCASE("round trip is bit exact") {
    const PointCloud pc = sphere_patch({0.1, -0.2, 0.5}, 0.17, 500, 77);
    for (CloudFormat fmt : {CloudFormat::kXyzCsv, CloudFormat::kAsciiPly}) {
      const std::string path =
          tmp_file(fmt == CloudFormat::kXyzCsv ? "climb_rt.csv" : "climb_rt.ply");
      save_point_cloud(pc, path, fmt);
      const PointCloud back = load_point_cloud(path, fmt);
      REQUIRE(back.size() == pc.size());
      for (int i = 0; i < pc.size(); ++i) CHECK(back.points[i] == pc.points[i]);
    }
  }

  SUBCASE("empty cloud throws") {
    const std::string path = tmp_file("climb_empty.csv");
    {
      std::FILE* f = std::fopen(path.c_str(), "w");
      std::fputs("# nothing\n", f);
      std::fclose(f);
    }
    CHECK_THROWS_AS(load_point_cloud(path), EmptyCloudError);
  }
}

TEST_CASE("voxel downsample") {
  SUBCASE("all points in one voxel collapse to the centroid") {
    PointCloud pc;
    pc.points = {{0.001, 0.001, 0.001}, {0.002, 0.003, 0.001}, {0.003, 0.002, 0.004}};
    const PointCloud out = voxel_downsample(pc, 0.01);
    REQUIRE(out.size() == 1);
    CHECK((out.points[0] - Eigen::Vector3d(0.002, 0.002, 0.002)).norm() < 1e-15);
  }

  SUBCASE("separated points stay put") {
    PointCloud pc;
    pc.points = {{0.0025, 0.0025, 0.0025}, {0.0125, 0.0025, 0.0025}, {0.0225, 0.0025, 0.0025}};
    CHECK(voxel_downsample(pc, 0.005).size() == 3);
  }

  SUBCASE("lattice count ratio approaches the volume ratio") {
    PointCloud pc;
    for (int x = 0; x < 30; ++x)
      for (int y = 0; y < 30; ++y)
        for (int z = 0; z < 2; ++z)
          pc.points.emplace_back(0.001 * x + 0.0003, 0.001 * y + 0.0003, 0.001 * z + 0.0003);
    const PointCloud out = voxel_downsample(pc, 0.005);
    // 30x30x2 lattice at 1 mm in 5 mm voxels: 6x6x1 occupied cells.
    CHECK(out.size() == 36);
  }

  SUBCASE("downsampling is idempotent") {
    const PointCloud pc = sphere_patch({0, 0, 0}, 0.17, 4000, 3);
    const PointCloud once = voxel_downsample(pc, 0.005);
    const PointCloud twice = voxel_downsample(once, 0.005);
    CHECK(once.size() == twice.size());
  }
}

TEST_CASE("msac sphere fitting") {
  MsacConfig cfg;
  cfg.seed = 11;

  SUBCASE("noiseless sphere is recovered within a millimetre") {
    const PointCloud pc = sphere_patch({0.3, 0.1, 0.8}, 0.170, 800, 5);
    const auto cands = msac_sphere_fit(pc, cfg);
    REQUIRE(cands.size() == 1);
    CHECK(std::abs(cands[0].radius - 0.170) < 0.001);
    CHECK((cands[0].center - Eigen::Vector3d(0.3, 0.1, 0.8)).norm() < 0.002);
  }

  SUBCASE("sphere outside the radius window is discarded") {
    const PointCloud pc = sphere_patch({0, 0, 0.5}, 0.300, 800, 6);
    CHECK(msac_sphere_fit(pc, cfg).empty());
  }

  SUBCASE("noise and outliers stay within five percent radius error") {
    PointCloud pc = sphere_patch({0.2, -0.1, 0.6}, 0.170, 700, 8, 0.002);
    add_outliers(&pc, 300, {-0.3, -0.6, 0.0}, {0.7, 0.4, 1.2}, 9);
    const auto cands = msac_sphere_fit(pc, cfg);
    REQUIRE_FALSE(cands.empty());
    CHECK(std::abs(cands[0].radius - 0.170) < 0.05 * 0.170);
  }

  SUBCASE("two spheres: only the windowed one survives") {
    PointCloud pc = sphere_patch({0, 0, 0.5}, 0.100, 600, 12);
    const PointCloud big = sphere_patch({0.9, 0, 0.6}, 0.300, 900, 13);
    pc.points.insert(pc.points.end(), big.points.begin(), big.points.end());
    const auto cands = msac_sphere_fit(pc, cfg);
    REQUIRE(cands.size() == 1);
    CHECK(std::abs(cands[0].radius - 0.100) < 0.005);
  }

  SUBCASE("coplanar cloud reports degeneracy") {
    PointCloud pc;
    CounterRng rng(4);
    for (int i = 0; i < 200; ++i)
      pc.points.emplace_back(rng.uniform(0, 1), rng.uniform(0, 1), 0.25);
    CHECK_THROWS_AS(msac_sphere_fit(pc, cfg), DegenerateSamplesError);
  }

  SUBCASE("fixed seeds reproduce the same candidates") {
    PointCloud pc = sphere_patch({0.2, -0.1, 0.6}, 0.170, 700, 8, 0.002);
    add_outliers(&pc, 300, {-0.3, -0.6, 0.0}, {0.7, 0.4, 1.2}, 9);
    const auto a = msac_sphere_fit(pc, cfg);
    const auto b = msac_sphere_fit(pc, cfg);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].radius == b[i].radius);
      CHECK((a[i].center - b[i].center).norm() == 0.0);
    }
  }
}

TEST_CASE("normal estimation") {
  SUBCASE("plane viewed from above") {
    PointCloud pc;
    for (int x = 0; x < 20; ++x)
      for (int y = 0; y < 20; ++y) pc.points.emplace_back(0.01 * x, 0.01 * y, 0.0);
    const auto normals = estimate_normals(pc, 12, {0.1, 0.1, 1.0});
    for (const auto& n : normals) CHECK((n - Eigen::Vector3d(0, 0, 1)).norm() < 1e-9);
  }

  SUBCASE("sphere normals are radial within five degrees") {
    const Eigen::Vector3d center(0, 0, 0);
    const PointCloud pc = sphere_patch(center, 0.15, 6000, 21);
    const auto normals = estimate_normals(pc, 30, {0, 0, 1.0});
    int checked = 0;
    for (size_t i = 0; i < normals.size(); ++i) {
      const Eigen::Vector3d radial = (pc.points[i] - center).normalized();
      // Only where the sensor-facing orientation is unambiguous.
      if (radial.z() < 0.3) continue;
      const double angle = std::acos(std::clamp(normals[i].dot(radial), -1.0, 1.0));
      CHECK(angle < 5.0 * kPi / 180.0);
      ++checked;
    }
    CHECK(checked > 1000);
  }

  SUBCASE("neighbourhood of the whole cloud gives the global plane") {
    PointCloud pc;
    CounterRng rng(2);
    for (int i = 0; i < 40; ++i)
      pc.points.emplace_back(rng.uniform(0, 1), rng.uniform(0, 1),
                             0.3 + 1e-4 * rng.gaussian());
    const auto normals = estimate_normals(pc, 39, {0.5, 0.5, 10.0});
    for (const auto& n : normals) CHECK(std::abs(n.z()) > 0.999);
  }

  SUBCASE("collinear points are degenerate") {
    PointCloud pc;
    for (int i = 0; i < 30; ++i) pc.points.emplace_back(0.01 * i, 0.0, 0.0);
    CHECK_THROWS_AS(estimate_normals(pc, 5), DegenerateNeighborhoodError);
  }
}

TEST_CASE("alpha maps") {
  SUBCASE("flat facing patch is ungraspable") {
    PointCloud pc;
    for (int x = 0; x < 15; ++x)
      for (int y = 0; y < 15; ++y) pc.points.emplace_back(0.01 * x, 0.01 * y, 0.2);
    const auto normals = estimate_normals(pc, 10, {0.05, 0.05, 5.0});
    const AlphaMap am = alpha_map(pc, normals, {0, 0, 1});
    CHECK(am.graspable_count() == 0);
    for (double a : am.alpha) CHECK(a < 1e-6);
  }

  SUBCASE("hemisphere yields the analytic annulus") {
    const double r = 0.15;
    const PointCloud dense = sphere_patch({0, 0, 0}, r, 30000, 31);
    const PointCloud pc = voxel_downsample(dense, 0.005);
    const auto normals = estimate_normals(pc, 20, {0, 0, 2.0});
    const AlphaMap am = alpha_map(pc, normals, {0, 0, 1});
    // Points whose polar angle is inside [25, 85] degrees should be marked,
    // within one voxel of the rings.
    const double band = 0.005 / r;  // one voxel in angle
    int mismatches = 0, total = 0;
    for (int i = 0; i < pc.size(); ++i) {
      const double polar = std::acos(std::clamp(pc.points[i].z() / r, -1.0, 1.0));
      if (polar > 80.0 * kPi / 180.0) continue;  // rim: normals flip ambiguity
      const bool inside_core = polar > am.alpha_min + band && polar < am.alpha_max - band;
      const bool outside_all = polar < am.alpha_min - band || polar > am.alpha_max + band;
      ++total;
      if (inside_core && !am.graspable[i]) ++mismatches;
      if (outside_all && am.graspable[i]) ++mismatches;
    }
    CHECK(total > 500);
    CHECK(mismatches == 0);
  }

  SUBCASE("field-style patch between 55 and 60 degrees is fully graspable") {
    PointCloud pc;
    std::vector<Eigen::Vector3d> normals;
    CounterRng rng(41);
    for (int i = 0; i < 200; ++i) {
      const double a = rng.uniform(55.0 * kPi / 180.0, 60.0 * kPi / 180.0);
      const double az = rng.uniform(0.0, 2 * kPi);
      normals.emplace_back(std::sin(a) * std::cos(az), std::sin(a) * std::sin(az),
                           std::cos(a));
      pc.points.emplace_back(rng.gaussian(), rng.gaussian(), rng.gaussian());
    }
    const AlphaMap am = alpha_map(pc, normals, {0, 0, 1});
    CHECK(am.graspable_count() == pc.size());
  }

  SUBCASE("alpha is invariant under a rigid rotation of cloud and axis") {
    const PointCloud pc = sphere_patch({0, 0, 0}, 0.15, 3000, 51);
    const auto normals = estimate_normals(pc, 25, {0, 0, 2.0});
    const AlphaMap base = alpha_map(pc, normals, {0, 0, 1});

    const Eigen::Quaterniond rot(Eigen::AngleAxisd(0.8, Eigen::Vector3d(1, 2, 0).normalized()));
    PointCloud pc_r;
    for (const auto& p : pc.points) pc_r.points.push_back(rot * p);
    const auto normals_r = estimate_normals(pc_r, 25, rot * Eigen::Vector3d(0, 0, 2.0));
    const AlphaMap rotated = alpha_map(pc_r, normals_r, rot * Eigen::Vector3d(0, 0, 1));
    for (int i = 0; i < pc.size(); ++i)
      CHECK(std::abs(base.alpha[i] - rotated.alpha[i]) < 1e-6);
  }
}

TEST_CASE("grasp site ranking") {
  GraspScenario gripper = GraspScenario::field_test();
  SiteRankingConfig cfg;
  cfg.mc.n_grid = 3;
  cfg.mc.n_mc = 60;
  cfg.mc.seed = 5;
  cfg.preferred_dir = {0.3, 0.2};

  SphereCandidate a;
  a.id = 0;
  a.radius = 0.170;

  SUBCASE("single candidate gives a singleton list") {
    const auto sites = rank_grasp_sites({a}, gripper, cfg);
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].score > 0.0);
    CHECK(sites[0].alpha == doctest::Approx(alpha_from_ratio(0.06 / 0.17)));
  }

  SUBCASE("higher friction ranks first under shared draws") {
    SphereCandidate b = a;
    b.id = 1;
    GraspScenario slick = gripper;
    slick.friction = 0.2;
    GraspScenario grippy = gripper;
    grippy.friction = 0.4;
    const auto lo = rank_grasp_sites({a}, slick, cfg);
    const auto hi = rank_grasp_sites({b}, grippy, cfg);
    CHECK(hi[0].score >= lo[0].score);
  }

  SUBCASE("candidate below the alpha window ranks last with zero score") {
    SphereCandidate flat;
    flat.id = 1;
    flat.radius = 1.2;  // link/rock ratio 0.05: alpha about 5.7 degrees
    const auto sites = rank_grasp_sites({a, flat}, gripper, cfg);
    REQUIRE(sites.size() == 2);
    CHECK(sites[0].candidate.id == 0);
    CHECK(sites[1].candidate.id == 1);
    CHECK(sites[1].score == 0.0);
    CHECK_FALSE(sites[1].within_window);
  }

  SUBCASE("ranking is stable across runs") {
    SphereCandidate b = a;
    b.id = 1;
    b.radius = 0.120;
    const auto r1 = rank_grasp_sites({a, b}, gripper, cfg);
    const auto r2 = rank_grasp_sites({a, b}, gripper, cfg);
    REQUIRE(r1.size() == r2.size());
    for (size_t i = 0; i < r1.size(); ++i) {
      CHECK(r1[i].candidate.id == r2[i].candidate.id);
      CHECK(r1[i].score == r2[i].score);
    }
  }
}
