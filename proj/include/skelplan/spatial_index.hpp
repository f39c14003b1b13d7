#pragma once

#include <cstddef>
#include <vector>

#include "skelplan/voxel_core.hpp"

namespace skelplan {

/// Static 3-D k-D tree over a point set. Query results are indices into the
/// construction array, ordered by increasing distance (ties by index).
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Point> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& point(std::size_t i) const { return points_[i]; }

  std::vector<std::size_t> radius_search(const Point& query, double radius) const;
  std::vector<std::size_t> knn_search(const Point& query, std::size_t k) const;

 private:
  struct Node {
    std::size_t point = 0;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end, int depth);
  void radius_recurse(int node, const Point& q, double r2, std::vector<std::size_t>& out) const;
  void knn_recurse(int node, const Point& q, std::size_t k, std::vector<std::pair<double, std::size_t>>& heap) const;

  std::vector<Point> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace skelplan
