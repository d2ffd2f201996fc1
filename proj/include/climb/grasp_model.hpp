#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>

namespace climb {

// Geometry, friction and suspension parameters for a three-finger microspine
// grasp on a locally spherical rock feature.
struct GraspScenario {
  std::array<double, 3> alpha{0.674, 0.674, 0.674};  // rad, per finger
  double rock_radius = 0.116;   // m
  double wrist_offset = 0.045;  // m, wrist standoff above the surface
  double link_length = 0.060;   // m
  double friction = 0.39;
  double stiffness_normal = 15.0;          // N/m
  double stiffness_tangential = 3.0e6;     // N/m
  double stiffness_circumferential = 1.0;  // N/m
  std::array<int, 3> spines_per_finger{20, 20, 20};
  double internal_force = 6.0;  // N, grasp force per finger
  double spine_strength = 12.0; // N, max tangential load on one spine

  int total_spines() const {
    return spines_per_finger[0] + spines_per_finger[1] + spines_per_finger[2];
  }
  void set_uniform_spines(int n) { spines_per_finger = {n, n, n}; }

  void validate() const;

  // Parameter set used for the reference limit surfaces.
  static GraspScenario field_test();
};

// Pull direction: beta is the polar angle from the wrist axis, phi the
// azimuth in the canonical [0, 2*pi/3) cell.
struct PullDirection {
  double beta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d unit() const {
    return {std::sin(beta) * std::cos(phi), std::sin(beta) * std::sin(phi), std::cos(beta)};
  }
};

// Solved fingertip force components, (F_n, F_t, F_c) per finger.
struct ContactForces {
  Eigen::Matrix<double, 9, 1> f = Eigen::Matrix<double, 9, 1>::Zero();

  double normal(int finger) const { return f(3 * finger + 0); }
  double tangential(int finger) const { return f(3 * finger + 1); }
  double circumferential(int finger) const { return f(3 * finger + 2); }
};

struct ContactLostError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularGraspError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Single-spine Coulomb no-slip test on an asperity of inclination psi.
// Throws ContactLostError when the contact normal load is not positive.
bool spine_no_slip(double f_t, double f_n, double f_c, double f_p, double psi, double alpha,
                   double mu);

// Shear and normal loads of one spine in the asperity contact frame.
void spine_contact_loads(double f_t, double f_n, double f_c, double f_p, double psi,
                         double alpha, double* shear, double* normal);

// 9x9 compliant grasp system A*F = B. Column blocks use each finger's own
// alpha; with equal alphas the assembly reduces to the single-alpha matrix.
void assemble_grasp_system(const GraspScenario& scn, const PullDirection& dir, double f_pull,
                           Eigen::Matrix<double, 9, 9>* a, Eigen::Matrix<double, 9, 1>* b);

ContactForces solve_contact_forces(const GraspScenario& scn, const PullDirection& dir,
                                   double f_pull);

// Geometric closure between the link/rock ratio and the wrap angle:
// cos(alpha) = (1 - (l/r)^2) / (1 + (l/r)^2).
double alpha_from_ratio(double ratio);
double ratio_from_alpha(double alpha);

}  // namespace climb
