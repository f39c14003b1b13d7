#pragma once

#include <cmath>

#include "skelplan/voxel_core.hpp"

namespace skelplan {

struct MedialAxisConfig {
  /// Minimum separation angle between basis points; default has cos = 0.825.
  double theta = std::acos(0.825);
  double min_gvd_distance = 0.4;
  int min_edge_neighbors = 18;

  void validate() const;
};

/// Separation test between the parent directions of a voxel and one of its
/// neighbors: true iff normalize(neighbor_parent - neighbor_to_voxel) .
/// normalize(voxel_parent) < cos(theta). Parents point from a voxel to its
/// surface voxel, so the difference is the offset from this voxel to the
/// neighbor's surface voxel. A zero offset counts as maximal separation.
/// Throws std::invalid_argument("unparented voxel") on a zero voxel_parent.
bool is_medial(const GridIndex& voxel_parent, const GridIndex& neighbor_parent, const GridIndex& neighbor_to_voxel,
               double theta);

/// Marks free voxels with clearance >= min_gvd_distance that pass is_medial
/// against at least one observed, parented 6-neighbor.
SkeletonLayer extract_gvd(const EsdfLayer& esdf, const MedialAxisConfig& config);

/// Sets is_edge on medial voxels with at least `min_edge_neighbors` medial
/// voxels among their 26 neighbors.
void classify_edges(SkeletonLayer& skeleton, int min_edge_neighbors);

/// Marks as edges the non-edge voxels enclosed by the edge set (background
/// pockets unreachable from outside through 6-connected steps) whose clearance
/// is at least `min_distance`. Returns the number of voxels added.
std::size_t fill_edge_cavities(SkeletonLayer& skeleton, const EsdfLayer& esdf, double min_distance);

/// Diagnostic only: number of distinct basis points (parent surface voxels)
/// seen by a voxel and its 26 neighbors, after merging basis points that lie
/// within `merge_radius` voxels of each other.
int count_basis_points(const EsdfLayer& esdf, const GridIndex& index, double merge_radius = 2.0);

}  // namespace skelplan
