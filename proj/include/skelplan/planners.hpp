#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "skelplan/sparse_graph.hpp"
#include "skelplan/spatial_index.hpp"
#include "skelplan/voxel_core.hpp"

namespace skelplan {

struct PlanRequest {
  Point start = Point::Zero();
  Point goal = Point::Zero();
  double robot_radius = 0.3;
  double time_limit = 1.0;  // seconds, sampling planners only
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct PlanResult {
  std::string planner;
  bool success = false;
  std::vector<Point> waypoints;
  double path_length = 0.0;
  double solve_time = 0.0;
  std::size_t solution_vertices = 0;
  std::size_t expansions = 0;  // node expansions or tree samples
  std::optional<double> first_solution_time;
  std::optional<double> first_solution_length;
  std::optional<std::size_t> first_solution_vertices;
};

/// Start or goal is unknown space or closer than the robot radius to an obstacle.
class InvalidEndpointError : public std::invalid_argument {
 public:
  InvalidEndpointError() : std::invalid_argument("invalid endpoint") {}
};

double path_length(const std::vector<Point>& waypoints);
nlohmann::json plan_result_to_json(const PlanResult& result);

/// Grid A* through voxels with distance above the robot radius.
PlanResult astar_esdf(const EsdfLayer& esdf, const PlanRequest& request);

/// Connector searches from both ends to the diagram, then A* on the diagram.
PlanResult astar_diagram(const EsdfLayer& esdf, const SkeletonLayer& skeleton, const PlanRequest& request);

struct SparsePlannerConfig {
  std::size_t attach_candidates = 5;
  bool skip_flagged = false;
};

/// A* over a finished sparse graph; the vertex k-D tree is built once.
class SparseGraphPlanner {
 public:
  SparseGraphPlanner(const SparseGraph& graph, const EsdfLayer& esdf, SparsePlannerConfig config = {});
  PlanResult plan(const PlanRequest& request) const;

 private:
  std::optional<VertexId> attach(const Point& p, double radius) const;

  const SparseGraph& graph_;
  const EsdfLayer& esdf_;
  SparsePlannerConfig config_;
  std::vector<VertexId> ids_;
  KdTree tree_;
};

PlanResult astar_sparse(const SparseGraph& graph, const EsdfLayer& esdf, const PlanRequest& request);

struct RrtConfig {
  double step_voxels = 5.0;  // extension length in voxel sizes
  double goal_bias = 0.05;
  /// Stops after this many samples when non-zero, in addition to the time limit.
  std::size_t max_iterations = 0;
  /// RRT* only: return as soon as a first solution exists.
  bool stop_at_first_solution = false;
};

PlanResult rrt_connect(const EsdfLayer& esdf, const PlanRequest& request, const RrtConfig& config = {});
PlanResult rrt_star(const EsdfLayer& esdf, const PlanRequest& request, const RrtConfig& config = {});

/// Names accepted by the CLI, in benchmark order.
const std::vector<std::string>& planner_names();

}  // namespace skelplan
