#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace climb {

// Triangle surface mesh with per-face outward unit normals and areas.
// Degenerate (zero-area) faces are dropped at construction.
struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Eigen::Vector3d> face_normals;
  std::vector<double> face_areas;

  int face_count() const { return static_cast<int>(triangles.size()); }
  double total_area() const;

  // Recomputes normals/areas from vertices+triangles; validates indices.
  void finalize();

  Eigen::Vector3d face_vertex(int face, int corner) const {
    return vertices[triangles[face][corner]];
  }
};

TriMesh load_mesh(const std::string& path);          // dispatch on extension
TriMesh load_stl_ascii(const std::string& path);
TriMesh load_obj(const std::string& path);
void save_stl_ascii(const TriMesh& mesh, const std::string& path);

// Ray/segment vs triangle (Moller-Trumbore). Returns hit parameter t along
// the segment p0 + t*(p1-p0), or a negative value on miss.
double segment_triangle_hit(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                            const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                            const Eigen::Vector3d& c);

bool segment_triangle_intersects(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                 const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                 const Eigen::Vector3d& c);

double point_triangle_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                               const Eigen::Vector3d& b, const Eigen::Vector3d& c);

double segment_segment_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                const Eigen::Vector3d& q0, const Eigen::Vector3d& q1);

double segment_triangle_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                 const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                 const Eigen::Vector3d& c);

// Uniform-grid acceleration structure for segment queries against a mesh.
class MeshGrid {
 public:
  MeshGrid() = default;
  explicit MeshGrid(const TriMesh& mesh, double cell_size = -1.0);

  // Face index of the nearest intersection along [p0, p1], or -1.
  // On hit, *t_out receives the segment parameter.
  int nearest_hit(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                  double* t_out = nullptr) const;

  bool any_hit(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1) const;

  // True if the segment passes within `margin` of any face.
  bool within_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                       double margin) const;

  const TriMesh* mesh() const { return mesh_; }

 private:
  void cells_overlapping(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                         std::vector<int>* out) const;
  int cell_index(int ix, int iy, int iz) const { return (iz * ny_ + iy) * nx_ + ix; }

  const TriMesh* mesh_ = nullptr;
  Eigen::Vector3d origin_{0, 0, 0};
  double cell_ = 1.0;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<std::vector<int>> bins_;
  mutable std::vector<int> scratch_;
};

}  // namespace climb
