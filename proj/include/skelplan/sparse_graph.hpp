#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "skelplan/voxel_core.hpp"

namespace skelplan {

using EdgeId = std::int64_t;

struct SparseVertex {
  VertexId id = -1;
  Point position = Point::Zero();
  double distance = 0.0;
  int subgraph_id = -1;
  std::set<EdgeId> edge_ids;
  GridIndex voxel{};
};

/// Undirected straight-line edge backed by a route through the diagram.
struct SparseEdge {
  EdgeId id = -1;
  VertexId start = -1;
  VertexId end = -1;
  std::vector<GridIndex> diagram_path;  // start voxel ... end voxel
  double min_clearance = 0.0;           // ESDF minimum along the straight line
  bool flagged = false;                 // straight line closer than the robot radius
  bool repair = false;                  // added while joining subgraphs
};

class SparseGraph {
 public:
  explicit SparseGraph(double voxel_size = 0.1) : voxel_size_(voxel_size) {}

  double voxel_size() const { return voxel_size_; }
  const std::map<VertexId, SparseVertex>& vertices() const { return vertices_; }
  const std::map<EdgeId, SparseEdge>& edges() const { return edges_; }
  const SparseVertex& vertex(VertexId id) const { return vertices_.at(id); }
  SparseVertex& vertex(VertexId id) { return vertices_.at(id); }
  const SparseEdge& edge(EdgeId id) const { return edges_.at(id); }
  SparseEdge& edge(EdgeId id) { return edges_.at(id); }
  bool has_vertex(VertexId id) const { return vertices_.count(id) != 0; }

  /// Keeps v.id when non-negative and unused, otherwise assigns the next id.
  VertexId add_vertex(SparseVertex v);
  EdgeId add_edge(SparseEdge e);
  void remove_edge(EdgeId id);
  /// Removes the vertex and every incident edge.
  void remove_vertex(VertexId id);

  std::vector<EdgeId> edges_between(VertexId a, VertexId b) const;
  VertexId other_end(EdgeId edge, VertexId from) const;

  /// Flood fill over edges; writes subgraph_id and returns the label count.
  int label_subgraphs();
  std::size_t size() const { return vertices_.size() + edges_.size(); }

 private:
  double voxel_size_;
  std::map<VertexId, SparseVertex> vertices_;
  std::map<EdgeId, SparseEdge> edges_;
  VertexId next_vertex_id_ = 0;
  EdgeId next_edge_id_ = 0;
};

struct GraphConfig {
  double r_prune = 0.4;
  /// Split threshold in meters; unset means twice the voxel size.
  std::optional<double> max_edge_deviation;
  /// Edges whose straight line comes closer to obstacles than this are flagged.
  double robot_radius = 0.3;
  int max_split_passes = 10;
  /// A second edge between the same vertices needs this fraction of its
  /// route to differ.
  double min_route_difference = 0.5;

  void validate() const;
  double deviation_threshold(double voxel_size) const;
};

// ---------------------------------------------------------------------------
// Construction stages

/// Voxels with exactly one or more than three 26-neighbors on the diagram.
/// Sets is_vertex on them and returns vertices with sequential ids.
std::vector<SparseVertex> extract_vertices(SkeletonLayer& skeleton);
/// Rule used by extract_vertices, exposed for tests.
bool is_vertex_neighborhood(Neighborhood diagram);

/// Greedy in descending clearance: each survivor removes every other vertex
/// within r_prune. Ties go to the smaller voxel index.
std::vector<SparseVertex> prune_vertices(const std::vector<SparseVertex>& vertices, double r_prune);

/// Makes is_vertex / vertex_id in the skeleton match `vertices` exactly.
void mark_vertices(SkeletonLayer& skeleton, const std::vector<SparseVertex>& vertices);

std::vector<SparseEdge> follow_edges(const SkeletonLayer& skeleton, const std::vector<SparseVertex>& vertices,
                                     double min_route_difference = 0.5);

/// Fraction of the union of two routes not shared by both.
double route_difference(const std::vector<GridIndex>& a, const std::vector<GridIndex>& b);

struct DiagramPath {
  std::vector<GridIndex> voxels;
  double cost = 0.0;  // meters
};

/// Shortest path through diagram voxels (edge or vertex).
std::optional<DiagramPath> diagram_astar(const SkeletonLayer& skeleton, const GridIndex& start,
                                         const GridIndex& goal);

struct Deviation {
  double distance = 0.0;  // meters
  std::size_t index = 0;  // position in the route
};

/// Largest distance of a route voxel center from the segment between the
/// route's end voxels.
Deviation max_deviation(const std::vector<GridIndex>& route, double voxel_size);

struct SplitStats {
  int passes = 0;
  std::size_t vertices_added = 0;
  std::size_t reconnections = 0;
};

SplitStats split_edges(SparseGraph& graph, SkeletonLayer& skeleton, const GraphConfig& config);

struct RepairStats {
  std::size_t removed_vertices = 0;
  std::size_t added_edges = 0;
  int components = 0;
};

RepairStats repair_subgraphs(SparseGraph& graph, SkeletonLayer& skeleton, const GraphConfig& config);

/// Fills min_clearance and flagged for every edge.
void compute_edge_clearance(SparseGraph& graph, const EsdfLayer& esdf, double robot_radius);

struct GraphBuildTimings {
  double vertices_s = 0.0;
  double edges_s = 0.0;
  double splitting_s = 0.0;
  double repair_s = 0.0;
};

/// Vertex extraction through repair on a thinned skeleton.
SparseGraph build_sparse_graph(SkeletonLayer& skeleton, const EsdfLayer& esdf, const GraphConfig& config,
                               GraphBuildTimings* timings = nullptr);

/// Restores vertex ids on a skeleton loaded from disk using the graph.
void attach_vertex_ids(SkeletonLayer& skeleton, const SparseGraph& graph);

/// Number of diagram components (26-connected) that contain at least two
/// vertex voxels.
int diagram_components_with_vertices(const SkeletonLayer& skeleton, int min_vertices = 2);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json graph_to_json(const SparseGraph& graph);
SparseGraph graph_from_json(const nlohmann::json& j);
void save_graph(const std::string& path, const SparseGraph& graph);
SparseGraph load_graph(const std::string& path);
/// ASCII PLY with vertices and edge segments.
void export_graph_ply(const std::string& path, const SparseGraph& graph);

}  // namespace skelplan
