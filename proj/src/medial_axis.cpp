#include "skelplan/medial_axis.hpp"

#include <climits>
#include <stdexcept>
#include <vector>

namespace skelplan {

void MedialAxisConfig::validate() const {
  if (!(theta > 0.0 && theta < M_PI)) throw std::invalid_argument("theta must be in (0, pi)");
  if (min_gvd_distance < 0.0) throw std::invalid_argument("min_gvd_distance must be non-negative");
  if (min_edge_neighbors < 0 || min_edge_neighbors > 26)
    throw std::invalid_argument("min_edge_neighbors must be in [0, 26]");
}

bool is_medial(const GridIndex& voxel_parent, const GridIndex& neighbor_parent, const GridIndex& neighbor_to_voxel,
               double theta) {
  if (voxel_parent.is_zero()) throw std::invalid_argument("unparented voxel");
  if (neighbor_parent.is_zero()) throw std::invalid_argument("unparented neighbor");
  const Eigen::Vector3d bisector = (neighbor_parent - neighbor_to_voxel).cast();
  const double norm = bisector.norm();
  if (norm == 0.0) return true;
  const Eigen::Vector3d vp = voxel_parent.cast();
  return (bisector / norm).dot(vp / vp.norm()) < std::cos(theta);
}

SkeletonLayer extract_gvd(const EsdfLayer& esdf, const MedialAxisConfig& config) {
  config.validate();
  SkeletonLayer skeleton(esdf.voxel_size());
  const double cos_theta = std::cos(config.theta);
  for (const GridIndex& b : esdf.sorted_blocks()) {
    const auto& block = *esdf.find_block(b);
    SkeletonLayer::Block* out_block = nullptr;
    for (int l = 0; l < kVoxelsPerBlock; ++l) {
      const EsdfVoxel& v = block[l];
      if (!v.observed || v.fixed || v.parent.is_zero() || v.distance < config.min_gvd_distance) continue;
      const GridIndex idx = from_linear_in_block(b, l);
      const Eigen::Vector3d vp = v.parent.cast().normalized();
      bool medial = false;
      for (const GridIndex& o : offsets6()) {
        const EsdfVoxel* n = esdf.find(idx + o);
        if (n == nullptr || !n->observed || n->parent.is_zero()) continue;
        // Same test as is_medial, inlined with the cosine hoisted.
        const Eigen::Vector3d bisector = (n->parent + o).cast();
        const double norm = bisector.norm();
        if (norm == 0.0 || (bisector / norm).dot(vp) < cos_theta) {
          medial = true;
          break;
        }
      }
      if (!medial) continue;
      if (out_block == nullptr) out_block = &skeleton.allocate_block(b);
      SkeletonVoxel& s = (*out_block)[l];
      s.on_medial_axis = true;
      s.distance = v.distance;
    }
  }
  return skeleton;
}

void classify_edges(SkeletonLayer& skeleton, int min_edge_neighbors) {
  std::vector<GridIndex> edges;
  skeleton.for_each([&](const GridIndex& idx, const SkeletonVoxel& v) {
    if (!v.on_medial_axis) return;
    int count = 0;
    for (const GridIndex& o : offsets26()) {
      const SkeletonVoxel* n = skeleton.find(idx + o);
      if (n != nullptr && n->on_medial_axis) ++count;
    }
    if (count >= min_edge_neighbors) edges.push_back(idx);
  });
  skeleton.for_each_mutable([](const GridIndex&, SkeletonVoxel& v) { v.is_edge = false; });
  for (const GridIndex& idx : edges) skeleton.find(idx)->is_edge = true;
}

std::size_t fill_edge_cavities(SkeletonLayer& skeleton, const EsdfLayer& esdf, double min_distance) {
  GridIndex lo{INT_MAX, INT_MAX, INT_MAX};
  GridIndex hi{INT_MIN, INT_MIN, INT_MIN};
  bool any = false;
  skeleton.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
    if (!v.is_edge) return;
    any = true;
    lo = {std::min(lo.x, i.x), std::min(lo.y, i.y), std::min(lo.z, i.z)};
    hi = {std::max(hi.x, i.x), std::max(hi.y, i.y), std::max(hi.z, i.z)};
  });
  if (!any) return 0;
  // Dense grid with a one-voxel margin; flood the outside through non-edge cells.
  lo = lo - GridIndex{1, 1, 1};
  hi = hi + GridIndex{1, 1, 1};
  const int nx = hi.x - lo.x + 1;
  const int ny = hi.y - lo.y + 1;
  const int nz = hi.z - lo.z + 1;
  auto flat = [&](const GridIndex& g) {
    return static_cast<std::size_t>(g.x - lo.x) + static_cast<std::size_t>(nx) * (g.y - lo.y + std::size_t(ny) * (g.z - lo.z));
  };
  std::vector<char> state(static_cast<std::size_t>(nx) * ny * nz, 0);  // 1 edge, 2 outside
  skeleton.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
    if (v.is_edge) state[flat(i)] = 1;
  });
  std::vector<GridIndex> stack{lo};
  state[flat(lo)] = 2;
  while (!stack.empty()) {
    const GridIndex cur = stack.back();
    stack.pop_back();
    for (const GridIndex& n : neighbors6(cur)) {
      if (n.x < lo.x || n.y < lo.y || n.z < lo.z || n.x > hi.x || n.y > hi.y || n.z > hi.z) continue;
      char& s = state[flat(n)];
      if (s != 0) continue;
      s = 2;
      stack.push_back(n);
    }
  }
  std::size_t filled = 0;
  for (int z = lo.z; z <= hi.z; ++z)
    for (int y = lo.y; y <= hi.y; ++y)
      for (int x = lo.x; x <= hi.x; ++x) {
        const GridIndex g{x, y, z};
        if (state[flat(g)] != 0) continue;
        const EsdfVoxel* e = esdf.find(g);
        if (e == nullptr || !e->observed || e->distance < min_distance) continue;
        SkeletonVoxel& v = skeleton.at(g);
        v.distance = e->distance;
        v.is_edge = true;
        ++filled;
      }
  return filled;
}

int count_basis_points(const EsdfLayer& esdf, const GridIndex& index, double merge_radius) {
  std::vector<GridIndex> basis;
  auto consider = [&](const GridIndex& at) {
    const EsdfVoxel* v = esdf.find(at);
    if (v == nullptr || !v->observed || v->parent.is_zero()) return;
    const GridIndex surface = at + v->parent;
    for (const GridIndex& b : basis)
      if ((b - surface).norm() <= merge_radius) return;
    basis.push_back(surface);
  };
  consider(index);
  for (const GridIndex& o : offsets26()) consider(index + o);
  return static_cast<int>(basis.size());
}

}  // namespace skelplan
