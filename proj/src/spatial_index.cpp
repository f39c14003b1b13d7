#include "skelplan/spatial_index.hpp"

#include <algorithm>

namespace skelplan {

KdTree::KdTree(std::vector<Point> points) : points_(std::move(points)) {
  std::vector<std::size_t> order(points_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  nodes_.reserve(points_.size());
  root_ = build(order, 0, order.size(), 0);
}

int KdTree::build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end, int depth) {
  if (begin >= end) return -1;
  const int axis = depth % 3;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     if (points_[a][axis] != points_[b][axis]) return points_[a][axis] < points_[b][axis];
                     return a < b;
                   });
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({order[mid], axis, -1, -1});
  const int left = build(order, begin, mid, depth + 1);
  const int right = build(order, mid + 1, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::radius_recurse(int node, const Point& q, double r2, std::vector<std::size_t>& out) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const Point& p = points_[n.point];
  if ((p - q).squaredNorm() <= r2) out.push_back(n.point);
  const double diff = q[n.axis] - p[n.axis];
  radius_recurse(diff <= 0.0 ? n.left : n.right, q, r2, out);
  if (diff * diff <= r2) radius_recurse(diff <= 0.0 ? n.right : n.left, q, r2, out);
}

std::vector<std::size_t> KdTree::radius_search(const Point& query, double radius) const {
  std::vector<std::size_t> out;
  radius_recurse(root_, query, radius * radius, out);
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    const double da = (points_[a] - query).squaredNorm();
    const double db = (points_[b] - query).squaredNorm();
    return da != db ? da < db : a < b;
  });
  return out;
}

void KdTree::knn_recurse(int node, const Point& q, std::size_t k,
                         std::vector<std::pair<double, std::size_t>>& heap) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const Point& p = points_[n.point];
  const std::pair<double, std::size_t> entry{(p - q).squaredNorm(), n.point};
  if (heap.size() < k) {
    heap.push_back(entry);
    std::push_heap(heap.begin(), heap.end());
  } else if (entry < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = entry;
    std::push_heap(heap.begin(), heap.end());
  }
  const double diff = q[n.axis] - p[n.axis];
  knn_recurse(diff <= 0.0 ? n.left : n.right, q, k, heap);
  if (heap.size() < k || diff * diff <= heap.front().first) knn_recurse(diff <= 0.0 ? n.right : n.left, q, k, heap);
}

std::vector<std::size_t> KdTree::knn_search(const Point& query, std::size_t k) const {
  std::vector<std::pair<double, std::size_t>> heap;
  if (k == 0) return {};
  knn_recurse(root_, query, k, heap);
  std::sort(heap.begin(), heap.end());
  std::vector<std::size_t> out;
  for (const auto& [_, i] : heap) out.push_back(i);
  return out;
}

}  // namespace skelplan
