#include "climb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace climb {

double TriMesh::total_area() const {
  double s = 0.0;
  for (double a : face_areas) s += a;
  return s;
}

void TriMesh::finalize() {
  face_normals.clear();
  face_areas.clear();
  std::vector<std::array<int, 3>> kept;
  kept.reserve(triangles.size());
  const int nv = static_cast<int>(vertices.size());
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) throw std::invalid_argument("mesh: triangle index out of range");
    }
    const Eigen::Vector3d e1 = vertices[t[1]] - vertices[t[0]];
    const Eigen::Vector3d e2 = vertices[t[2]] - vertices[t[0]];
    const Eigen::Vector3d n = e1.cross(e2);
    const double a2 = n.norm();
    if (a2 < 1e-14) continue;  // degenerate face
    kept.push_back(t);
    face_normals.push_back(n / a2);
    face_areas.push_back(0.5 * a2);
  }
  triangles = std::move(kept);
}

TriMesh load_mesh(const std::string& path) {
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  if (ext == "stl") return load_stl_ascii(path);
  if (ext == "obj") return load_obj(path);
  throw std::invalid_argument("mesh: unsupported extension '" + ext + "'");
}

TriMesh load_stl_ascii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mesh: cannot open " + path);
  TriMesh m;
  std::string tok;
  std::vector<Eigen::Vector3d> tri;
  while (in >> tok) {
    if (tok == "vertex") {
      Eigen::Vector3d v;
      if (!(in >> v.x() >> v.y() >> v.z())) throw std::runtime_error("mesh: bad vertex in " + path);
      tri.push_back(v);
      if (tri.size() == 3) {
        const int base = static_cast<int>(m.vertices.size());
        m.vertices.insert(m.vertices.end(), tri.begin(), tri.end());
        m.triangles.push_back({base, base + 1, base + 2});
        tri.clear();
      }
    }
  }
  if (m.triangles.empty() && !tri.empty()) throw std::runtime_error("mesh: truncated facet in " + path);
  m.finalize();
  return m;
}

TriMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mesh: cannot open " + path);
  TriMesh m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Eigen::Vector3d v;
      ls >> v.x() >> v.y() >> v.z();
      m.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string f;
      while (ls >> f) {
        // "i", "i/j", "i/j/k" forms; indices are 1-based
        idx.push_back(std::stoi(f.substr(0, f.find('/'))) - 1);
      }
      for (size_t k = 2; k < idx.size(); ++k) {
        m.triangles.push_back({idx[0], idx[k - 1], idx[k]});
      }
    }
  }
  m.finalize();
  return m;
}

void save_stl_ascii(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("mesh: cannot write " + path);
  out << "solid mesh\n";
  char buf[256];
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Eigen::Vector3d& n = mesh.face_normals[f];
    std::snprintf(buf, sizeof(buf), "facet normal %.9g %.9g %.9g\n", n.x(), n.y(), n.z());
    out << buf << "  outer loop\n";
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d v = mesh.face_vertex(f, k);
      std::snprintf(buf, sizeof(buf), "    vertex %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
      out << buf;
    }
    out << "  endloop\nendfacet\n";
  }
  out << "endsolid mesh\n";
}

double segment_triangle_hit(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                            const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                            const Eigen::Vector3d& c) {
  const Eigen::Vector3d dir = p1 - p0;
  const Eigen::Vector3d e1 = b - a;
  const Eigen::Vector3d e2 = c - a;
  const Eigen::Vector3d pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-14) return -1.0;
  const double inv = 1.0 / det;
  const Eigen::Vector3d tv = p0 - a;
  const double u = tv.dot(pv) * inv;
  if (u < -1e-12 || u > 1.0 + 1e-12) return -1.0;
  const Eigen::Vector3d qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < -1e-12 || u + v > 1.0 + 1e-12) return -1.0;
  const double t = e2.dot(qv) * inv;
  if (t < -1e-12 || t > 1.0 + 1e-12) return -1.0;
  return std::clamp(t, 0.0, 1.0);
}

bool segment_triangle_intersects(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                 const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                 const Eigen::Vector3d& c) {
  return segment_triangle_hit(p0, p1, a, b, c) >= 0.0;
}

double point_triangle_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                               const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  // Ericson, Real-Time Collision Detection, closest point on triangle.
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return (p - a).norm();
  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return (p - b).norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const double v = d1 / (d1 - d3);
    return (p - (a + v * ab)).norm();
  }
  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return (p - c).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const double w = d2 / (d2 - d6);
    return (p - (a + w * ac)).norm();
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).norm();
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return (p - (a + v * ab + w * ac)).norm();
}

double segment_segment_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                const Eigen::Vector3d& q0, const Eigen::Vector3d& q1) {
  const Eigen::Vector3d d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.dot(d1), e = d2.dot(d2), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-18 && e <= 1e-18) return r.norm();
  if (a <= 1e-18) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-18) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > 1e-18) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

double segment_triangle_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                 const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                 const Eigen::Vector3d& c) {
  if (segment_triangle_intersects(p0, p1, a, b, c)) return 0.0;
  double d = std::min(point_triangle_distance(p0, a, b, c), point_triangle_distance(p1, a, b, c));
  d = std::min(d, segment_segment_distance(p0, p1, a, b));
  d = std::min(d, segment_segment_distance(p0, p1, b, c));
  d = std::min(d, segment_segment_distance(p0, p1, c, a));
  return d;
}

MeshGrid::MeshGrid(const TriMesh& mesh, double cell_size) : mesh_(&mesh) {
  if (mesh.face_count() == 0) {
    nx_ = ny_ = nz_ = 1;
    bins_.resize(1);
    return;
  }
  Eigen::Vector3d lo = mesh.vertices[0], hi = mesh.vertices[0];
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Eigen::Vector3d ext = (hi - lo).cwiseMax(1e-9);
  if (cell_size <= 0.0) {
    // aim for ~2 faces per cell
    const double vol = ext.x() * ext.y() * ext.z();
    cell_size = std::cbrt(std::max(vol, 1e-18) / std::max(1, mesh.face_count() / 2));
    cell_size = std::max(cell_size, 1e-6);
  }
  cell_ = cell_size;
  origin_ = lo - Eigen::Vector3d::Constant(0.5 * cell_);
  nx_ = std::max(1, static_cast<int>(std::ceil((ext.x() + cell_) / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil((ext.y() + cell_) / cell_)));
  nz_ = std::max(1, static_cast<int>(std::ceil((ext.z() + cell_) / cell_)));
  bins_.assign(static_cast<size_t>(nx_) * ny_ * nz_, {});
  for (int f = 0; f < mesh.face_count(); ++f) {
    Eigen::Vector3d flo = mesh.face_vertex(f, 0), fhi = flo;
    for (int k = 1; k < 3; ++k) {
      flo = flo.cwiseMin(mesh.face_vertex(f, k));
      fhi = fhi.cwiseMax(mesh.face_vertex(f, k));
    }
    std::vector<int> cells;
    cells_overlapping(flo, fhi, &cells);
    for (int c : cells) bins_[c].push_back(f);
  }
}

void MeshGrid::cells_overlapping(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                                 std::vector<int>* out) const {
  out->clear();
  auto clampi = [](int v, int n) { return std::min(std::max(v, 0), n - 1); };
  const int x0 = clampi(static_cast<int>(std::floor((lo.x() - origin_.x()) / cell_)), nx_);
  const int y0 = clampi(static_cast<int>(std::floor((lo.y() - origin_.y()) / cell_)), ny_);
  const int z0 = clampi(static_cast<int>(std::floor((lo.z() - origin_.z()) / cell_)), nz_);
  const int x1 = clampi(static_cast<int>(std::floor((hi.x() - origin_.x()) / cell_)), nx_);
  const int y1 = clampi(static_cast<int>(std::floor((hi.y() - origin_.y()) / cell_)), ny_);
  const int z1 = clampi(static_cast<int>(std::floor((hi.z() - origin_.z()) / cell_)), nz_);
  for (int z = z0; z <= z1; ++z)
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) out->push_back(cell_index(x, y, z));
}

int MeshGrid::nearest_hit(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                          double* t_out) const {
  if (!mesh_ || mesh_->face_count() == 0) return -1;
  cells_overlapping(p0.cwiseMin(p1), p0.cwiseMax(p1), &scratch_);
  double best_t = 2.0;
  int best_f = -1;
  for (int c : scratch_) {
    for (int f : bins_[c]) {
      const double t = segment_triangle_hit(p0, p1, mesh_->face_vertex(f, 0),
                                            mesh_->face_vertex(f, 1), mesh_->face_vertex(f, 2));
      if (t >= 0.0 && t < best_t) {
        best_t = t;
        best_f = f;
      }
    }
  }
  if (best_f >= 0 && t_out) *t_out = best_t;
  return best_f;
}

bool MeshGrid::any_hit(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1) const {
  if (!mesh_ || mesh_->face_count() == 0) return false;
  cells_overlapping(p0.cwiseMin(p1), p0.cwiseMax(p1), &scratch_);
  for (int c : scratch_) {
    for (int f : bins_[c]) {
      if (segment_triangle_intersects(p0, p1, mesh_->face_vertex(f, 0), mesh_->face_vertex(f, 1),
                                      mesh_->face_vertex(f, 2)))
        return true;
    }
  }
  return false;
}

bool MeshGrid::within_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                               double margin) const {
  if (!mesh_ || mesh_->face_count() == 0) return false;
  const Eigen::Vector3d pad = Eigen::Vector3d::Constant(margin);
  cells_overlapping(p0.cwiseMin(p1) - pad, p0.cwiseMax(p1) + pad, &scratch_);
  for (int c : scratch_) {
    for (int f : bins_[c]) {
      if (segment_triangle_distance(p0, p1, mesh_->face_vertex(f, 0), mesh_->face_vertex(f, 1),
                                    mesh_->face_vertex(f, 2)) <= margin)
        return true;
    }
  }
  return false;
}

}  // namespace climb
