#include "skelplan/collision.hpp"

#include <cmath>
#include <limits>

namespace skelplan {

double esdf_distance_at(const EsdfLayer& esdf, const Point& p) {
  const EsdfVoxel* v = esdf.find(esdf.index_of(p));
  if (v == nullptr || !v->observed) return -std::numeric_limits<double>::infinity();
  return v->distance;
}

double segment_min_clearance(const EsdfLayer& esdf, const Point& a, const Point& b, double step) {
  const double length = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(length / step)));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) best = std::min(best, esdf_distance_at(esdf, a + (b - a) * (double(i) / n)));
  return best;
}

bool segment_is_free(const EsdfLayer& esdf, const Point& a, const Point& b, double radius) {
  const double length = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(length / (0.5 * esdf.voxel_size()))));
  for (int i = 0; i <= n; ++i)
    if (esdf_distance_at(esdf, a + (b - a) * (double(i) / n)) < radius) return false;
  return true;
}

bool path_is_collision_free(const EsdfLayer& esdf, const std::vector<Point>& waypoints, double radius) {
  if (waypoints.empty()) return false;
  if (waypoints.size() == 1) return esdf_distance_at(esdf, waypoints.front()) >= radius;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    if (!segment_is_free(esdf, waypoints[i - 1], waypoints[i], radius)) return false;
  return true;
}

}  // namespace skelplan
