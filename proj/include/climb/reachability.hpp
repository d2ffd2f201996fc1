#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <functional>
#include <set>
#include <vector>

#include "climb/mesh.hpp"

namespace climb {

// One simulated finger above a rock patch. The five cases add mobility in
// strict succession, so every case's states embed in the next one's.
struct FingerCase {
  int id = 1;  // 1..5
  double proximal_length = 0.060;  // m
  double distal_length = 0.053;    // m
  double spine_length = 0.010;     // m

  double angle_step = 5.0 * 3.14159265358979323846 / 180.0;
  double travel_step = 0.002;  // m

  double base_range = 90.0 * 3.14159265358979323846 / 180.0;       // +/- base revolute
  double bend_min = 0.0;                                           // inter-phalange
  double bend_max = 120.0 * 3.14159265358979323846 / 180.0;
  double lateral_range = 45.0 * 3.14159265358979323846 / 180.0;    // ball joint, +/-
  double twist_range = 30.0 * 3.14159265358979323846 / 180.0;      // ball joint, +/-
  double spine_rot_range = 45.0 * 3.14159265358979323846 / 180.0;  // +/-
  double travel_max = 0.010;  // m, tangential and normal

  static FingerCase preset(int id) {
    FingerCase c;
    c.id = id;
    return c;
  }
};

// Base frame sitting `standoff` above the patch along its mean normal.
struct FingerBasePose {
  Eigen::Vector3d position{0, 0, 0};
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();  // z points at the surface

  static FingerBasePose above_patch(const TriMesh& mesh, double standoff);
};

struct FingerState {
  // Phalange endpoints and the spine segment, world frame.
  Eigen::Vector3d base;
  Eigen::Vector3d knuckle;
  Eigen::Vector3d tip;
  Eigen::Vector3d spine_start;
  Eigen::Vector3d spine_end;
};

// Number of grid states of each degree of freedom for the case.
std::vector<int> state_grid_shape(const FingerCase& c);
long state_count(const FingerCase& c);

// Invokes fn for every sampled configuration.
void sample_finger_states(const FingerCase& c, const FingerBasePose& base,
                          const std::function<void(const FingerState&)>& fn);

bool finger_collides(const FingerState& s, const MeshGrid& grid);

struct ReachabilityResult {
  std::set<int> good_faces;
  double area = 0.0;
  long states_total = 0;
  long states_collision_free = 0;
};

// A face is good when some collision-free state's spine meets it first and
// within the attack window measured from the face normal.
ReachabilityResult reachable_faces(const FingerCase& c, const TriMesh& mesh,
                                   const FingerBasePose& base,
                                   double attack_min = 10.0 * 3.14159265358979323846 / 180.0,
                                   double attack_max = 30.0 * 3.14159265358979323846 / 180.0);

struct CaseAreas {
  std::vector<int> case_ids;
  std::vector<double> areas;
  std::vector<int> face_counts;
};

CaseAreas compare_cases(const TriMesh& mesh, const FingerBasePose& base);

}  // namespace climb
