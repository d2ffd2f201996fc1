#include "climb/reachability.hpp"

#include <cmath>

namespace climb {

namespace {

// Grids are built around an exact zero so every case's states reappear
// verbatim in the next case's enumeration.
std::vector<double> grid_one_sided(double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::round(hi / step));
  v.reserve(n + 1);
  for (int i = 0; i <= n; ++i) v.push_back(i * step);
  return v;
}

std::vector<double> grid_symmetric(double range, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::round(range / step));
  v.reserve(2 * n + 1);
  for (int i = -n; i <= n; ++i) v.push_back(i * step);
  return v;
}

struct Grids {
  std::vector<double> base;
  std::vector<double> bend;
  std::vector<double> lateral;
  std::vector<double> twist;
  std::vector<double> spine_rot;
  std::vector<double> travel;
};

Grids make_grids(const FingerCase& c) {
  Grids g;
  g.base = grid_symmetric(c.base_range, c.angle_step);
  g.bend = c.id >= 2 ? grid_one_sided(c.bend_max - c.bend_min, c.angle_step)
                     : std::vector<double>{0.0};
  g.lateral = c.id >= 3 ? grid_symmetric(c.lateral_range, c.angle_step)
                        : std::vector<double>{0.0};
  g.twist = c.id >= 3 ? grid_symmetric(c.twist_range, c.angle_step)
                      : std::vector<double>{0.0};
  g.spine_rot = c.id >= 4 ? grid_symmetric(c.spine_rot_range, c.angle_step)
                          : std::vector<double>{0.0};
  g.travel = c.id >= 5 ? grid_one_sided(c.travel_max, c.travel_step)
                       : std::vector<double>{0.0};
  return g;
}

struct ChainPose {
  Eigen::Vector3d knuckle;
  Eigen::Vector3d tip;
  Eigen::Matrix3d distal_frame;  // z along the distal phalange
};

ChainPose chain_pose(const FingerCase& c, const FingerBasePose& base, double theta, double bend,
                     double lateral, double twist) {
  ChainPose p;
  const Eigen::Matrix3d r0 =
      base.frame * Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Vector3d d1 = r0.col(2);
  p.knuckle = base.position + c.proximal_length * d1;
  Eigen::Matrix3d r1 = r0 * Eigen::AngleAxisd(bend, Eigen::Vector3d::UnitY()).toRotationMatrix();
  if (lateral != 0.0 || twist != 0.0) {
    r1 = r1 * Eigen::AngleAxisd(lateral, Eigen::Vector3d::UnitX()).toRotationMatrix() *
         Eigen::AngleAxisd(twist, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  }
  p.distal_frame = r1;
  p.tip = p.knuckle + c.distal_length * r1.col(2);
  return p;
}

FingerState assemble_state(const FingerCase& c, const FingerBasePose& base, const ChainPose& cp,
                           double spine_rot, double travel_t, double travel_n) {
  FingerState s;
  s.base = base.position;
  s.knuckle = cp.knuckle;
  s.tip = cp.tip;
  Eigen::Vector3d dir = cp.distal_frame.col(2);
  if (spine_rot != 0.0) {
    dir = cp.distal_frame *
          (Eigen::AngleAxisd(spine_rot, Eigen::Vector3d::UnitY()) * Eigen::Vector3d::UnitZ());
  }
  s.spine_start = cp.tip + travel_t * cp.distal_frame.col(0) + travel_n * dir;
  s.spine_end = s.spine_start + c.spine_length * dir;
  return s;
}

}  // namespace

FingerBasePose FingerBasePose::above_patch(const TriMesh& mesh, double standoff) {
  FingerBasePose p;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& v : mesh.vertices) centroid += v;
  if (!mesh.vertices.empty()) centroid /= static_cast<double>(mesh.vertices.size());
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  for (int f = 0; f < mesh.face_count(); ++f) n += mesh.face_areas[f] * mesh.face_normals[f];
  if (n.norm() < 1e-12) n = Eigen::Vector3d::UnitZ();
  n.normalize();
  // Slide out of the surface along the mean normal, then stand off.
  double extent = 0.0;
  for (const auto& v : mesh.vertices) extent = std::max(extent, (v - centroid).dot(n));
  p.position = centroid + (extent + standoff) * n;
  const Eigen::Vector3d z = -n;  // look at the surface
  Eigen::Vector3d aux = std::abs(z.z()) < 0.9 ? Eigen::Vector3d::UnitZ()
                                              : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d x = aux.cross(z).normalized();
  p.frame.col(0) = x;
  p.frame.col(1) = z.cross(x);
  p.frame.col(2) = z;
  return p;
}

std::vector<int> state_grid_shape(const FingerCase& c) {
  const Grids g = make_grids(c);
  std::vector<int> shape{static_cast<int>(g.base.size())};
  if (c.id >= 2) shape.push_back(static_cast<int>(g.bend.size()));
  if (c.id >= 3) {
    shape.push_back(static_cast<int>(g.lateral.size()));
    shape.push_back(static_cast<int>(g.twist.size()));
  }
  if (c.id >= 4) shape.push_back(static_cast<int>(g.spine_rot.size()));
  if (c.id >= 5) {
    shape.push_back(static_cast<int>(g.travel.size()));
    shape.push_back(static_cast<int>(g.travel.size()));
  }
  return shape;
}

long state_count(const FingerCase& c) {
  long n = 1;
  for (int s : state_grid_shape(c)) n *= s;
  return n;
}

void sample_finger_states(const FingerCase& c, const FingerBasePose& base,
                          const std::function<void(const FingerState&)>& fn) {
  const Grids g = make_grids(c);
  for (double theta : g.base) {
    for (double bend : g.bend) {
      for (double lat : g.lateral) {
        for (double tw : g.twist) {
          const ChainPose cp = chain_pose(c, base, theta, bend, lat, tw);
          for (double rot : g.spine_rot) {
            for (double tt : g.travel) {
              for (double tn : g.travel) {
                fn(assemble_state(c, base, cp, rot, tt, tn));
              }
            }
          }
        }
      }
    }
  }
}

bool finger_collides(const FingerState& s, const MeshGrid& grid) {
  return grid.any_hit(s.base, s.knuckle) || grid.any_hit(s.knuckle, s.tip);
}

ReachabilityResult reachable_faces(const FingerCase& c, const TriMesh& mesh,
                                   const FingerBasePose& base, double attack_min,
                                   double attack_max) {
  ReachabilityResult res;
  if (mesh.face_count() == 0) return res;
  const MeshGrid grid(mesh);
  const Grids g = make_grids(c);

  Eigen::Vector3d bb_lo = mesh.vertices[0], bb_hi = mesh.vertices[0];
  for (const auto& v : mesh.vertices) {
    bb_lo = bb_lo.cwiseMin(v);
    bb_hi = bb_hi.cwiseMax(v);
  }
  const double spine_reach = c.spine_length + 2.0 * c.travel_max;
  const double cos_min = std::cos(attack_max);
  const double cos_max = std::cos(attack_min);

  const long spine_variants = static_cast<long>(g.spine_rot.size()) * g.travel.size() *
                              g.travel.size();
  std::vector<char> good(mesh.face_count(), 0);
  for (double theta : g.base) {
    for (double bend : g.bend) {
      for (double lat : g.lateral) {
        for (double tw : g.twist) {
          const ChainPose cp = chain_pose(c, base, theta, bend, lat, tw);
          res.states_total += spine_variants;
          FingerState probe = assemble_state(c, base, cp, 0.0, 0.0, 0.0);
          if (finger_collides(probe, grid)) continue;
          res.states_collision_free += spine_variants;
          // Quick reject: the spine cannot reach the mesh from here.
          const Eigen::Vector3d clamped = cp.tip.cwiseMax(bb_lo).cwiseMin(bb_hi);
          if ((cp.tip - clamped).norm() > spine_reach) continue;

          for (double rot : g.spine_rot) {
            Eigen::Vector3d dir = cp.distal_frame.col(2);
            if (rot != 0.0) {
              dir = cp.distal_frame * (Eigen::AngleAxisd(rot, Eigen::Vector3d::UnitY()) *
                                       Eigen::Vector3d::UnitZ());
            }
            for (double tt : g.travel) {
              for (double tn : g.travel) {
                const Eigen::Vector3d start =
                    cp.tip + tt * cp.distal_frame.col(0) + tn * dir;
                double t_hit;
                const int face =
                    grid.nearest_hit(start, start + c.spine_length * dir, &t_hit);
                if (face < 0 || good[face]) continue;
                const double c_att = -dir.dot(mesh.face_normals[face]);
                if (c_att >= cos_min && c_att <= cos_max) good[face] = 1;
              }
            }
          }
        }
      }
    }
  }
  for (int f = 0; f < mesh.face_count(); ++f) {
    if (!good[f]) continue;
    res.good_faces.insert(f);
    res.area += mesh.face_areas[f];
  }
  return res;
}

CaseAreas compare_cases(const TriMesh& mesh, const FingerBasePose& base) {
  CaseAreas out;
  for (int id = 1; id <= 5; ++id) {
    const ReachabilityResult r = reachable_faces(FingerCase::preset(id), mesh, base);
    out.case_ids.push_back(id);
    out.areas.push_back(r.area);
    out.face_counts.push_back(static_cast<int>(r.good_faces.size()));
  }
  return out;
}

}  // namespace climb
