#pragma once

#include <vector>

#include "skelplan/voxel_core.hpp"

namespace skelplan {

/// Distance stored in the voxel containing `p`; -infinity for unknown space.
double esdf_distance_at(const EsdfLayer& esdf, const Point& p);

/// Minimum ESDF distance over points spaced at most `step` apart on [a, b],
/// both ends included.
double segment_min_clearance(const EsdfLayer& esdf, const Point& a, const Point& b, double step);

/// Samples [a, b] at voxel_size / 2 and requires distance >= radius everywhere.
bool segment_is_free(const EsdfLayer& esdf, const Point& a, const Point& b, double radius);

/// segment_is_free over every consecutive waypoint pair (and the single
/// waypoint of a one-point path).
bool path_is_collision_free(const EsdfLayer& esdf, const std::vector<Point>& waypoints, double radius);

}  // namespace skelplan
