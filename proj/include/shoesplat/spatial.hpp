#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace shoesplat {

/// Static k-d tree over 3D points for exact k-nearest-neighbour queries.
/// Ties in distance are broken by the smaller point index so results are
/// deterministic.
class KdTree {
 public:
  struct Neighbor {
    std::uint32_t index;
    double squared_distance;
  };

  explicit KdTree(std::vector<Eigen::Vector3d> points);

  size_t size() const { return points_.size(); }

  /// Up to `k` nearest points sorted by (distance, index). `exclude` skips one
  /// point index, typically the query's own.
  std::vector<Neighbor> nearest(const Eigen::Vector3d& query, size_t k,
                                std::int64_t exclude = -1) const;

 private:
  struct Node {
    std::uint32_t begin, end;  // range in order_
    std::int32_t left = -1, right = -1;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Eigen::Vector3d& q, size_t k, std::int64_t exclude,
              std::vector<Neighbor>& heap) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace shoesplat
