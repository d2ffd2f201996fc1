#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace climb {

struct PointCloud {
  std::vector<Eigen::Vector3d> points;

  int size() const { return static_cast<int>(points.size()); }
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyCloudError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateNeighborhoodError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CloudFormat { kAuto, kXyzCsv, kAsciiPly };

PointCloud load_point_cloud(const std::string& path, CloudFormat format = CloudFormat::kAuto);
void save_point_cloud(const PointCloud& pc, const std::string& path,
                      CloudFormat format = CloudFormat::kXyzCsv);

// One output point per occupied voxel (the member mean); the grid is
// anchored at the origin. Output is ordered by voxel index.
PointCloud voxel_downsample(const PointCloud& pc, double voxel_size);

// Plane-fit normals from the k nearest neighbours (self included), oriented
// toward the sensor origin. Collinear neighbourhoods throw.
std::vector<Eigen::Vector3d> estimate_normals(const PointCloud& pc, int knn_count,
                                              const Eigen::Vector3d& sensor_origin = {0, 0, 0});

struct AlphaMap {
  std::vector<double> alpha;   // rad, per point
  std::vector<bool> graspable;
  Eigen::Vector3d gripper_axis{0, 0, 1};
  double alpha_min = 25.0 * 3.14159265358979323846 / 180.0;
  double alpha_max = 85.0 * 3.14159265358979323846 / 180.0;

  int graspable_count() const {
    int n = 0;
    for (bool g : graspable) n += g ? 1 : 0;
    return n;
  }
};

AlphaMap alpha_map(const PointCloud& pc, const std::vector<Eigen::Vector3d>& normals,
                   const Eigen::Vector3d& gripper_axis,
                   double alpha_min = 25.0 * 3.14159265358979323846 / 180.0,
                   double alpha_max = 85.0 * 3.14159265358979323846 / 180.0);

// Brute-force-free neighbour queries for normal estimation.
class KdTree {
 public:
  explicit KdTree(const std::vector<Eigen::Vector3d>& points);
  // Indices of the k nearest points to `query` (including an exact match).
  std::vector<int> nearest(const Eigen::Vector3d& query, int k) const;

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };
  int build(std::vector<int>& idx, int lo, int hi, int depth);
  const std::vector<Eigen::Vector3d>* pts_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace climb
