#include "climb/grasp_model.hpp"

#include <cmath>

namespace climb {

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kSqrt3 = std::sqrt(3.0);
}  // namespace

void GraspScenario::validate() const {
  if (rock_radius <= 0) throw std::invalid_argument("grasp: rock_radius must be > 0");
  for (double a : alpha)
    if (a < 0 || a >= 0.5 * kPi) throw std::invalid_argument("grasp: alpha must be in [0, pi/2)");
  if (friction <= 0) throw std::invalid_argument("grasp: friction must be > 0");
  if (stiffness_normal <= 0 || stiffness_tangential <= 0 || stiffness_circumferential <= 0)
    throw std::invalid_argument("grasp: stiffnesses must be > 0");
  for (int n : spines_per_finger)
    if (n < 1) throw std::invalid_argument("grasp: every finger needs at least one spine");
}

GraspScenario GraspScenario::field_test() {
  GraspScenario s;
  s.alpha = {1.22, 0.52, 0.70};
  s.rock_radius = 0.116;
  s.wrist_offset = 0.045;
  s.friction = 0.39;
  s.stiffness_normal = 15.0;
  s.stiffness_tangential = 3.0e6;
  s.stiffness_circumferential = 1.0;
  s.set_uniform_spines(20);
  s.internal_force = 6.0;
  s.spine_strength = 12.0;
  return s;
}

void spine_contact_loads(double f_t, double f_n, double f_c, double f_p, double psi,
                         double alpha, double* shear, double* normal) {
  const double sx = f_t * std::cos(psi) - f_n * std::sin(psi) + f_p * std::cos(alpha + psi);
  const double sy = f_c;
  *shear = std::hypot(sx, sy);
  *normal = f_t * std::sin(psi) + f_n * std::cos(psi) + f_p * std::sin(alpha + psi);
}

bool spine_no_slip(double f_t, double f_n, double f_c, double f_p, double psi, double alpha,
                   double mu) {
  double shear, normal;
  spine_contact_loads(f_t, f_n, f_c, f_p, psi, alpha, &shear, &normal);
  if (normal <= 0.0) throw ContactLostError("spine contact normal load non-positive");
  return shear <= mu * normal;
}

void assemble_grasp_system(const GraspScenario& scn, const PullDirection& dir, double f_pull,
                           Eigen::Matrix<double, 9, 9>* a_out,
                           Eigen::Matrix<double, 9, 1>* b_out) {
  auto& a = *a_out;
  auto& b = *b_out;
  a.setZero();
  b.setZero();

  const double kn = scn.stiffness_normal;
  const double kt = scn.stiffness_tangential;
  const double kc = scn.stiffness_circumferential;

  std::array<double, 3> s, c;
  double s_mean = 0.0;
  for (int j = 0; j < 3; ++j) {
    s[j] = std::sin(scn.alpha[j]);
    c[j] = std::cos(scn.alpha[j]);
    s_mean += s[j] / 3.0;
  }
  // Fingers at exactly 0/120/240 degrees.
  const std::array<double, 3> cg = {1.0, -0.5, -0.5};
  const std::array<double, 3> sg = {0.0, kSqrt3 / 2.0, -kSqrt3 / 2.0};

  for (int j = 0; j < 3; ++j) {
    const int fn = 3 * j + 0, ft = 3 * j + 1, fc = 3 * j + 2;
    // Force equilibrium (rows 0-2).
    a(0, fn) = s[j] * cg[j];
    a(0, ft) = c[j] * cg[j];
    a(0, fc) = -sg[j];
    a(1, fn) = s[j] * sg[j];
    a(1, ft) = c[j] * sg[j];
    a(1, fc) = cg[j];
    a(2, fn) = c[j];
    a(2, ft) = -s[j];
    // Moment equilibrium about the contact centroid, scaled by 1/r (rows 3-4)
    // and by 1/(r*sin(alpha)) for the axial row (row 5).
    a(3, fn) = s[j] * c[j] * sg[j];
    a(3, ft) = -s[j] * s[j] * sg[j];
    a(4, fn) = -s[j] * c[j] * cg[j];
    a(4, ft) = s[j] * s[j] * cg[j];
    a(5, fc) = s_mean > 0.0 ? s[j] / s_mean : 1.0;
  }
  // Kinematic constraint rows: fingertip displacements expressed through the
  // suspension compliances, with the rock's rigid motion eliminated.
  for (int j = 0; j < 3; ++j) {
    a(6, 3 * j + 0) = s[j] / kn;
    a(6, 3 * j + 1) = c[j] / kt;
  }
  a(7, 0) = s[0] / kn;
  a(7, 1) = c[0] / kt;
  a(7, 5) = 1.0 / (kSqrt3 * kc);
  a(7, 8) = -1.0 / (kSqrt3 * kc);
  a(8, 0) = s[0] / (2.0 * kn);
  a(8, 1) = c[0] / (2.0 * kt);
  a(8, 2) = kSqrt3 / (2.0 * kc);
  a(8, 6) = s[2] / kn;
  a(8, 7) = c[2] / kt;

  const double sb = std::sin(dir.beta), cb = std::cos(dir.beta);
  const double cp = std::cos(dir.phi), sp = std::sin(dir.phi);
  const double alpha_bar = (scn.alpha[0] + scn.alpha[1] + scn.alpha[2]) / 3.0;
  const double arm = 1.0 - std::cos(alpha_bar) + scn.wrist_offset / scn.rock_radius;
  b(0) = -f_pull * sb * cp;
  b(1) = -f_pull * sb * sp;
  b(2) = -f_pull * cb;
  b(3) = f_pull * sb * sp * arm;
  b(4) = -f_pull * sb * cp * arm;
}

ContactForces solve_contact_forces(const GraspScenario& scn, const PullDirection& dir,
                                   double f_pull) {
  Eigen::Matrix<double, 9, 9> a;
  Eigen::Matrix<double, 9, 1> b;
  assemble_grasp_system(scn, dir, f_pull, &a, &b);
  Eigen::FullPivLU<Eigen::Matrix<double, 9, 9>> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw SingularGraspError("grasp system is rank-deficient");
  ContactForces f;
  f.f = lu.solve(b);
  return f;
}

double alpha_from_ratio(double ratio) {
  if (ratio < 0) throw std::invalid_argument("alpha_from_ratio: ratio must be >= 0");
  const double r2 = ratio * ratio;
  return std::acos(std::clamp((1.0 - r2) / (1.0 + r2), -1.0, 1.0));
}

double ratio_from_alpha(double alpha) {
  // Inverse of the closure: l/r = sin(a) / (1 + cos(a)) = tan(a/2).
  return std::tan(0.5 * alpha);
}

}  // namespace climb
