#include "climb/pointcloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <queue>
#include <sstream>

namespace climb {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

PointCloud load_xyz_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cloud: cannot open " + path);
  PointCloud pc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Eigen::Vector3d p;
    if (!(ls >> p.x() >> p.y() >> p.z()))
      throw ParseError("cloud: malformed row at line " + std::to_string(lineno) + " of " + path);
    if (!p.allFinite())
      throw ParseError("cloud: non-finite value at line " + std::to_string(lineno));
    pc.points.push_back(p);
  }
  if (pc.points.empty()) throw EmptyCloudError("cloud: no points in " + path);
  return pc;
}

PointCloud load_ascii_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cloud: cannot open " + path);
  std::string line;
  int lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("cloud: truncated ply header at line " +
                                                  std::to_string(lineno) + " of " + path);
    ++lineno;
  };
  next_line();
  if (line != "ply") throw ParseError("cloud: missing ply magic at line 1 of " + path);
  long vertex_count = -1;
  std::vector<std::string> properties;
  bool in_vertex_element = false;
  while (true) {
    next_line();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw ParseError("cloud: only ascii ply is supported: " + path);
    } else if (tag == "element") {
      std::string what;
      long count;
      ls >> what >> count;
      in_vertex_element = what == "vertex";
      if (in_vertex_element) vertex_count = count;
    } else if (tag == "property") {
      if (in_vertex_element) {
        std::string type, name;
        ls >> type >> name;
        properties.push_back(name);
      }
    } else if (tag == "end_header") {
      break;
    } else if (tag == "comment" || tag == "obj_info") {
      // skip
    } else {
      throw ParseError("cloud: unexpected ply header token '" + tag + "' at line " +
                       std::to_string(lineno));
    }
  }
  if (vertex_count < 0) throw ParseError("cloud: ply header missing vertex element in " + path);
  int ix = -1, iy = -1, iz = -1;
  for (size_t i = 0; i < properties.size(); ++i) {
    if (properties[i] == "x") ix = static_cast<int>(i);
    if (properties[i] == "y") iy = static_cast<int>(i);
    if (properties[i] == "z") iz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError("cloud: ply vertex element lacks x/y/z properties in " + path);
  PointCloud pc;
  pc.points.reserve(vertex_count);
  for (long v = 0; v < vertex_count; ++v) {
    next_line();
    std::istringstream ls(line);
    std::vector<double> vals(properties.size());
    for (auto& val : vals) {
      if (!(ls >> val))
        throw ParseError("cloud: malformed vertex row at line " + std::to_string(lineno));
    }
    pc.points.emplace_back(vals[ix], vals[iy], vals[iz]);
  }
  if (pc.points.empty()) throw EmptyCloudError("cloud: no points in " + path);
  return pc;
}

}  // namespace

PointCloud load_point_cloud(const std::string& path, CloudFormat format) {
  if (format == CloudFormat::kAuto) {
    format = ends_with(path, ".ply") ? CloudFormat::kAsciiPly : CloudFormat::kXyzCsv;
  }
  return format == CloudFormat::kAsciiPly ? load_ascii_ply(path) : load_xyz_csv(path);
}

void save_point_cloud(const PointCloud& pc, const std::string& path, CloudFormat format) {
  std::ofstream out(path);
  if (!out) throw ParseError("cloud: cannot write " + path);
  char buf[128];
  if (format == CloudFormat::kAsciiPly) {
    out << "ply\nformat ascii 1.0\nelement vertex " << pc.points.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (const auto& p : pc.points) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
      out << buf;
    }
  } else {
    for (const auto& p : pc.points) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.x(), p.y(), p.z());
      out << buf;
    }
  }
}

PointCloud voxel_downsample(const PointCloud& pc, double voxel_size) {
  if (voxel_size <= 0.0) throw std::invalid_argument("voxel_downsample: size must be > 0");
  struct Acc {
    Eigen::Vector3d sum{0, 0, 0};
    int count = 0;
  };
  // Ordered keys make the output order deterministic.
  std::map<std::array<long, 3>, Acc> grid;
  for (const auto& p : pc.points) {
    const std::array<long, 3> key = {static_cast<long>(std::floor(p.x() / voxel_size)),
                                     static_cast<long>(std::floor(p.y() / voxel_size)),
                                     static_cast<long>(std::floor(p.z() / voxel_size))};
    Acc& a = grid[key];
    a.sum += p;
    a.count += 1;
  }
  PointCloud out;
  out.points.reserve(grid.size());
  for (const auto& [key, acc] : grid) out.points.push_back(acc.sum / acc.count);
  return out;
}

KdTree::KdTree(const std::vector<Eigen::Vector3d>& points) : pts_(&points) {
  std::vector<int> idx(points.size());
  for (size_t i = 0; i < points.size(); ++i) idx[i] = static_cast<int>(i);
  nodes_.reserve(points.size());
  root_ = build(idx, 0, static_cast<int>(points.size()), 0);
}

int KdTree::build(std::vector<int>& idx, int lo, int hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 3;
  const int mid = (lo + hi) / 2;
  std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                   [this, axis](int a, int b) { return (*pts_)[a](axis) < (*pts_)[b](axis); });
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{idx[mid], axis, -1, -1});
  const int left = build(idx, lo, mid, depth + 1);
  const int right = build(idx, mid + 1, hi, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<int> KdTree::nearest(const Eigen::Vector3d& query, int k) const {
  // Max-heap of (distance^2, index) keeps the best k seen so far.
  std::priority_queue<std::pair<double, int>> heap;
  const auto& pts = *pts_;

  std::function<void(int)> visit = [&](int node_id) {
    if (node_id < 0) return;
    const Node& node = nodes_[node_id];
    const double d2 = (pts[node.point] - query).squaredNorm();
    if (static_cast<int>(heap.size()) < k) {
      heap.emplace(d2, node.point);
    } else if (d2 < heap.top().first) {
      heap.pop();
      heap.emplace(d2, node.point);
    }
    const double delta = query(node.axis) - pts[node.point](node.axis);
    const int near_side = delta < 0 ? node.left : node.right;
    const int far_side = delta < 0 ? node.right : node.left;
    visit(near_side);
    if (static_cast<int>(heap.size()) < k || delta * delta < heap.top().first) visit(far_side);
  };
  visit(root_);

  std::vector<int> out(heap.size());
  for (int i = static_cast<int>(out.size()) - 1; i >= 0; --i) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

std::vector<Eigen::Vector3d> estimate_normals(const PointCloud& pc, int knn_count,
                                              const Eigen::Vector3d& sensor_origin) {
  if (knn_count < 3) throw std::invalid_argument("estimate_normals: knn_count must be >= 3");
  if (pc.size() <= knn_count)
    throw std::invalid_argument("estimate_normals: cloud smaller than the neighbourhood");
  KdTree tree(pc.points);
  std::vector<Eigen::Vector3d> normals(pc.points.size());
  for (size_t i = 0; i < pc.points.size(); ++i) {
    const std::vector<int> nn = tree.nearest(pc.points[i], knn_count);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j : nn) mean += pc.points[j];
    mean /= static_cast<double>(nn.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j : nn) {
      const Eigen::Vector3d d = pc.points[j] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const Eigen::Vector3d& ev = es.eigenvalues();
    // Collinear neighbourhood: no unique plane.
    if (ev(1) <= 1e-9 * std::max(ev(2), 1e-30))
      throw DegenerateNeighborhoodError("estimate_normals: collinear neighbourhood at point " +
                                        std::to_string(i));
    Eigen::Vector3d n = es.eigenvectors().col(0);
    if (n.dot(sensor_origin - pc.points[i]) < 0.0) n = -n;
    normals[i] = n;
  }
  return normals;
}

AlphaMap alpha_map(const PointCloud& pc, const std::vector<Eigen::Vector3d>& normals,
                   const Eigen::Vector3d& gripper_axis, double alpha_min, double alpha_max) {
  if (normals.size() != pc.points.size())
    throw std::invalid_argument("alpha_map: normals/points size mismatch");
  AlphaMap out;
  out.gripper_axis = gripper_axis.normalized();
  out.alpha_min = alpha_min;
  out.alpha_max = alpha_max;
  out.alpha.resize(pc.points.size());
  out.graspable.resize(pc.points.size());
  for (size_t i = 0; i < pc.points.size(); ++i) {
    const Eigen::Vector3d& n = normals[i];
    const double a = std::atan2(n.cross(out.gripper_axis).norm(), n.dot(out.gripper_axis));
    out.alpha[i] = a;
    out.graspable[i] = a >= alpha_min && a <= alpha_max;
  }
  return out;
}

}  // namespace climb
