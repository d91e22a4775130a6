#include "shoesplat/spatial.hpp"

#include <algorithm>
#include <numeric>

namespace shoesplat {
namespace {

constexpr std::uint32_t kLeafSize = 8;

bool closer(const KdTree::Neighbor& a, const KdTree::Neighbor& b) {
  if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
  return a.index < b.index;
}

}  // namespace

KdTree::KdTree(std::vector<Eigen::Vector3d> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa != pb ? pa < pb : a < b;
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::int32_t node_id, const Eigen::Vector3d& q, size_t k,
                    std::int64_t exclude, std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      if (static_cast<std::int64_t>(idx) == exclude) continue;
      const Neighbor cand{idx, (points_[idx] - q).squaredNorm()};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), closer);
      } else if (closer(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), closer);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), closer);
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff < 0 ? node.left : node.right;
  const std::int32_t far = diff < 0 ? node.right : node.left;
  search(near, q, k, exclude, heap);
  // Points equal to the split value may sit on either side, hence <=.
  if (heap.size() < k || diff * diff <= heap.front().squared_distance) {
    search(far, q, k, exclude, heap);
  }
}

std::vector<KdTree::Neighbor> KdTree::nearest(const Eigen::Vector3d& query, size_t k,
                                              std::int64_t exclude) const {
  std::vector<Neighbor> heap;
  if (k == 0 || points_.empty()) return heap;
  heap.reserve(k + 1);
  search(0, query, k, exclude, heap);
  std::sort_heap(heap.begin(), heap.end(), closer);
  return heap;
}

}  // namespace shoesplat
