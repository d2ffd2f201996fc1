#include <doctest.h>

#include <Eigen/Dense>

#include "climb/grasp_model.hpp"
#include "climb/rng.hpp"

using namespace climb;

namespace {

constexpr double kPi = 3.14159265358979323846;

// The single-alpha system exactly as printed, for the symmetric-reduction
// check. Kept separate from the library assembly on purpose.
void printed_system(double al, double kn, double kt, double kc, double beta, double phi,
                    double f_pull, double arm, Eigen::Matrix<double, 9, 9>* a_out,
                    Eigen::Matrix<double, 9, 1>* b_out) {
  const double s = std::sin(al), c = std::cos(al);
  const double r3 = std::sqrt(3.0);
  Eigen::Matrix<double, 9, 9>& a = *a_out;
  a.setZero();
  a.row(0) << s, c, 0, -0.5 * s, -0.5 * c, -r3 / 2, -0.5 * s, -0.5 * c, r3 / 2;
  a.row(1) << 0, 0, 1, r3 / 2 * s, r3 / 2 * c, -0.5, -r3 / 2 * s, -r3 / 2 * c, -0.5;
  a.row(2) << c, -s, 0, c, -s, 0, c, -s, 0;
  a.row(3) << 0, 0, 0, r3 / 2 * s * c, -r3 / 2 * s * s, 0, -r3 / 2 * s * c, r3 / 2 * s * s, 0;
  a.row(4) << -s * c, s * s, 0, 0.5 * s * c, -0.5 * s * s, 0, 0.5 * s * c, -0.5 * s * s, 0;
  a.row(5) << 0, 0, 1, 0, 0, 1, 0, 0, 1;
  a.row(6) << s / kn, c / kt, 0, s / kn, c / kt, 0, s / kn, c / kt, 0;
  a.row(7) << s / kn, c / kt, 0, 0, 0, 1 / (r3 * kc), 0, 0, -1 / (r3 * kc);
  a.row(8) << s / (2 * kn), c / (2 * kt), r3 / (2 * kc), 0, 0, 0, s / kn, c / kt, 0;
  Eigen::Matrix<double, 9, 1>& b = *b_out;
  b.setZero();
  const double sb = std::sin(beta), cb = std::cos(beta);
  b(0) = -f_pull * sb * std::cos(phi);
  b(1) = -f_pull * sb * std::sin(phi);
  b(2) = -f_pull * cb;
  b(3) = f_pull * sb * std::sin(phi) * arm;
  b(4) = -f_pull * sb * std::cos(phi) * arm;
}

// Equilibrium oracle built from explicit 3D contact frames rather than the
// assembled matrix entries.
void equilibrium_residual(const GraspScenario& scn, const PullDirection& dir, double f_pull,
                          const ContactForces& f, double* force_res, double* moment_res) {
  const double gammas[3] = {0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};
  Eigen::Vector3d force_sum = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment_sum = Eigen::Vector3d::Zero();
  for (int j = 0; j < 3; ++j) {
    const double al = scn.alpha[j];
    const double cg = std::cos(gammas[j]), sg = std::sin(gammas[j]);
    const Eigen::Vector3d n(std::sin(al) * cg, std::sin(al) * sg, std::cos(al));
    const Eigen::Vector3d t(std::cos(al) * cg, std::cos(al) * sg, -std::sin(al));
    const Eigen::Vector3d c(-sg, cg, 0.0);
    const Eigen::Vector3d fj =
        f.normal(j) * n + f.tangential(j) * t + f.circumferential(j) * c;
    force_sum += fj;
    const Eigen::Vector3d rho =
        scn.rock_radius * std::sin(al) * Eigen::Vector3d(cg, sg, 0.0);
    moment_sum += rho.cross(fj);
  }
  const Eigen::Vector3d pull = f_pull * dir.unit();
  force_sum += pull;
  const double al_bar = (scn.alpha[0] + scn.alpha[1] + scn.alpha[2]) / 3.0;
  const double h = scn.rock_radius * (1.0 - std::cos(al_bar)) + scn.wrist_offset;
  moment_sum += Eigen::Vector3d(0, 0, h).cross(pull);
  *force_res = force_sum.norm();
  *moment_res = moment_sum.norm();
}

// Plain Gaussian elimination determinant, independent of Eigen's LU.
double det9_gauss(Eigen::Matrix<double, 9, 9> m) {
  double det = 1.0;
  for (int col = 0; col < 9; ++col) {
    int piv = col;
    for (int r = col + 1; r < 9; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) < 1e-300) return 0.0;
    if (piv != col) {
      m.row(piv).swap(m.row(col));
      det = -det;
    }
    det *= m(col, col);
    for (int r = col + 1; r < 9; ++r) {
      const double fac = m(r, col) / m(col, col);
      m.row(r) -= fac * m.row(col);
    }
  }
  return det;
}

}  // namespace

TEST_CASE("spine no-slip reduces to Coulomb on a flat asperity") {
  CHECK(spine_no_slip(0.9, 3.0, 0.0, 0.0, 0.0, 0.0, 0.39));
  CHECK_FALSE(spine_no_slip(1.3, 3.0, 0.0, 0.0, 0.0, 0.0, 0.39));
  // Boundary case F_t = mu * F_n holds (<=).
  CHECK(spine_no_slip(0.39 * 3.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.39));
  CHECK_THROWS_AS(spine_no_slip(0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.39), ContactLostError);
}

TEST_CASE("spine no-slip agrees with the contact-frame rotation oracle") {
  CounterRng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const double ft = rng.uniform(-5, 5), fn = rng.uniform(-5, 5), fc = rng.uniform(-5, 5);
    const double fp = rng.uniform(0, 5);
    const double psi = rng.uniform(0, kPi / 2), al = rng.uniform(0, 1.4);
    const double mu = rng.uniform(0.1, 1.0);
    // Rotate [ft, fn, fc, fp] into the asperity frame explicitly.
    Eigen::Matrix<double, 3, 4> rot;
    rot << std::cos(psi), -std::sin(psi), 0, std::cos(psi + al),
           0, 0, 1, 0,
           std::sin(psi), std::cos(psi), 0, std::sin(psi + al);
    const Eigen::Vector4d comp(ft, fn, fc, fp);
    const Eigen::Vector3d s = rot * comp;
    if (s.z() <= 0.0) {
      CHECK_THROWS_AS(spine_no_slip(ft, fn, fc, fp, psi, al, mu), ContactLostError);
      continue;
    }
    const bool oracle = std::hypot(s.x(), s.y()) <= mu * s.z();
    CHECK(spine_no_slip(ft, fn, fc, fp, psi, al, mu) == oracle);
  }
}

TEST_CASE("no-slip is monotone in friction") {
  CounterRng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const double ft = rng.uniform(-4, 4), fn = rng.uniform(0.1, 5), fc = rng.uniform(-2, 2);
    const double fp = rng.uniform(0, 4), psi = rng.uniform(0, 1.5), al = rng.uniform(0, 1.2);
    const double mu1 = rng.uniform(0.05, 0.8);
    const double mu2 = mu1 + rng.uniform(0.0, 0.8);
    bool ok1, ok2;
    try {
      ok1 = spine_no_slip(ft, fn, fc, fp, psi, al, mu1);
      ok2 = spine_no_slip(ft, fn, fc, fp, psi, al, mu2);
    } catch (const ContactLostError&) {
      continue;
    }
    if (ok1) CHECK(ok2);
  }
}

TEST_CASE("grasp system assembly details") {
  GraspScenario scn = GraspScenario::field_test();
  Eigen::Matrix<double, 9, 9> a;
  Eigen::Matrix<double, 9, 1> b;

  SUBCASE("symmetric wrap gives the unit circumferential moment row") {
    scn.alpha = {0.6, 0.6, 0.6};
    assemble_grasp_system(scn, {0.3, 0.4}, 5.0, &a, &b);
    Eigen::Matrix<double, 9, 1> row6;
    row6 << 0, 0, 1, 0, 0, 1, 0, 0, 1;
    CHECK((a.row(5).transpose() - row6).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("flat contact removes the in-plane moment rows") {
    scn.alpha = {0.0, 0.0, 0.0};
    assemble_grasp_system(scn, {0.3, 0.4}, 5.0, &a, &b);
    CHECK(a.row(3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.row(4).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("field parameter set is invertible") {
    assemble_grasp_system(scn, {0.3, 0.4}, 5.0, &a, &b);
    const double det = det9_gauss(a);
    CHECK(std::isfinite(det));
    CHECK(std::abs(det) > 0.0);
  }
}

TEST_CASE("per-finger assembly reduces to the printed single-alpha system") {
  CounterRng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const double al = rng.uniform(0.05, 1.5);
    GraspScenario scn;
    scn.alpha = {al, al, al};
    scn.rock_radius = rng.uniform(0.05, 0.3);
    scn.wrist_offset = rng.uniform(0.0, 0.08);
    scn.stiffness_normal = rng.uniform(5, 50);
    scn.stiffness_tangential = rng.uniform(1e5, 1e7);
    scn.stiffness_circumferential = rng.uniform(0.5, 5);
    const PullDirection dir{rng.uniform(0, kPi / 2), rng.uniform(0, 2 * kPi / 3)};
    const double f_pull = rng.uniform(0, 30);

    Eigen::Matrix<double, 9, 9> a, a_ref;
    Eigen::Matrix<double, 9, 1> b, b_ref;
    assemble_grasp_system(scn, dir, f_pull, &a, &b);
    const double arm = 1.0 - std::cos(al) + scn.wrist_offset / scn.rock_radius;
    printed_system(al, scn.stiffness_normal, scn.stiffness_tangential,
                   scn.stiffness_circumferential, dir.beta, dir.phi, f_pull, arm, &a_ref,
                   &b_ref);
    CHECK((a - a_ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((b - b_ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("contact force solutions") {
  GraspScenario scn = GraspScenario::field_test();

  SUBCASE("zero pull gives zero forces") {
    const ContactForces f = solve_contact_forces(scn, {0.7, 0.3}, 0.0);
    CHECK(f.f.norm() == 0.0);
  }

  SUBCASE("axial pull on a symmetric grasp loads fingers identically") {
    scn.alpha = {0.6, 0.6, 0.6};
    const ContactForces f = solve_contact_forces(scn, {0.0, 0.0}, 10.0);
    for (int j = 0; j < 3; ++j) {
      CHECK(f.normal(j) == doctest::Approx(f.normal(0)).epsilon(1e-9));
      CHECK(f.tangential(j) == doctest::Approx(f.tangential(0)).epsilon(1e-9));
      CHECK(std::abs(f.circumferential(j)) < 1e-9);
    }
  }

  SUBCASE("matches an independent dense solve at the field parameters") {
    const PullDirection dir{0.0, 0.0};
    const ContactForces f = solve_contact_forces(scn, dir, 10.0);
    Eigen::Matrix<double, 9, 9> a;
    Eigen::Matrix<double, 9, 1> b;
    assemble_grasp_system(scn, dir, 10.0, &a, &b);
    const Eigen::Matrix<double, 9, 1> ref = a.colPivHouseholderQr().solve(b);
    CHECK((f.f - ref).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a * f.f - b).norm() < 1e-9);
  }

  SUBCASE("re-summed equilibrium residuals vanish") {
    CounterRng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
      const PullDirection dir{rng.uniform(0, kPi / 2), rng.uniform(0, 2 * kPi / 3)};
      const double f_pull = rng.uniform(0, 40);
      const ContactForces f = solve_contact_forces(scn, dir, f_pull);
      double fr, mr;
      equilibrium_residual(scn, dir, f_pull, f, &fr, &mr);
      CHECK(fr < 1e-9);
      CHECK(mr < 1e-9);
    }
  }

  SUBCASE("forces scale linearly with the pull magnitude") {
    const PullDirection dir{0.9, 1.1};
    const ContactForces f1 = solve_contact_forces(scn, dir, 1.0);
    const ContactForces f10 = solve_contact_forces(scn, dir, 10.0);
    CHECK((10.0 * f1.f - f10.f).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("symmetric solutions permute cyclically with a 120 degree azimuth shift") {
    scn.alpha = {0.6, 0.6, 0.6};
    const PullDirection d1{0.8, 0.35};
    const PullDirection d2{0.8, 0.35 + 2 * kPi / 3};
    const ContactForces f1 = solve_contact_forces(scn, d1, 7.0);
    const ContactForces f2 = solve_contact_forces(scn, d2, 7.0);
    // Finger j under d2 sees what finger j-1 saw under d1.
    for (int j = 0; j < 3; ++j) {
      const int jp = (j + 1) % 3;
      CHECK(f2.normal(jp) == doctest::Approx(f1.normal(j)).epsilon(1e-7));
      CHECK(f2.tangential(jp) == doctest::Approx(f1.tangential(j)).epsilon(1e-7));
      CHECK(f2.circumferential(jp) == doctest::Approx(f1.circumferential(j)).epsilon(1e-7));
    }
  }
}

TEST_CASE("geometric closure between link ratio and wrap angle") {
  CHECK(alpha_from_ratio(0.0) == 0.0);
  CHECK(alpha_from_ratio(1.0) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(alpha_from_ratio(0.35) == doctest::Approx(38.6 * kPi / 180.0).epsilon(1e-3));

  // Closure equations: l*sin(a) = r*(1-cos(a)) and l*(1+cos(a)) = r*sin(a).
  const double ratio = 0.35;
  const double al = alpha_from_ratio(ratio);
  CHECK(ratio * std::sin(al) == doctest::Approx(1.0 - std::cos(al)).epsilon(1e-12));
  CHECK(ratio * (1.0 + std::cos(al)) == doctest::Approx(std::sin(al)).epsilon(1e-12));

  CounterRng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const double r = rng.uniform(0, 0.999);
    CHECK(std::abs(ratio_from_alpha(alpha_from_ratio(r)) - r) < 1e-12);
    const double a = rng.uniform(0, 1.5);
    CHECK(std::abs(alpha_from_ratio(ratio_from_alpha(a)) - a) < 1e-12);
  }
}
