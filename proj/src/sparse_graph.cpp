#include "skelplan/sparse_graph.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "skelplan/collision.hpp"
#include "skelplan/grid_search.hpp"
#include "skelplan/spatial_index.hpp"
#include "skelplan/thinning.hpp"

namespace skelplan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

using VoxelSet = std::unordered_set<GridIndex, GridIndexHash>;

bool on_diagram(const SkeletonLayer& skeleton, const GridIndex& i) {
  const SkeletonVoxel* v = skeleton.find(i);
  return v != nullptr && v->on_diagram();
}

Point normalized(const GridIndex& g) { return g.cast().normalized(); }

SparseVertex vertex_at(const SkeletonLayer& skeleton, const GridIndex& voxel) {
  SparseVertex v;
  v.voxel = voxel;
  v.position = skeleton.center(voxel);
  const SkeletonVoxel* sv = skeleton.find(voxel);
  v.distance = sv != nullptr ? sv->distance : 0.0;
  return v;
}

void set_vertex_flag(SkeletonLayer& skeleton, const GridIndex& voxel, std::optional<VertexId> id) {
  SkeletonVoxel* sv = skeleton.find(voxel);
  if (sv == nullptr) return;
  sv->is_vertex = id.has_value();
  sv->vertex_id = id;
}

bool has_similar_edge(const SparseGraph& graph, VertexId a, VertexId b, const std::vector<GridIndex>& route,
                      double min_difference) {
  for (EdgeId e : graph.edges_between(a, b))
    if (route_difference(graph.edge(e).diagram_path, route) <= min_difference) return true;
  return false;
}

SparseEdge make_edge(VertexId a, VertexId b, std::vector<GridIndex> route) {
  SparseEdge e;
  e.start = a;
  e.end = b;
  e.diagram_path = std::move(route);
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseGraph

VertexId SparseGraph::add_vertex(SparseVertex v) {
  if (v.id < 0 || vertices_.count(v.id) != 0) v.id = next_vertex_id_;
  next_vertex_id_ = std::max(next_vertex_id_, v.id + 1);
  v.edge_ids.clear();
  const VertexId id = v.id;
  vertices_.emplace(id, std::move(v));
  return id;
}

EdgeId SparseGraph::add_edge(SparseEdge e) {
  if (e.start == e.end) throw std::invalid_argument("edge endpoints must differ");
  if (!has_vertex(e.start) || !has_vertex(e.end)) throw std::invalid_argument("edge references a missing vertex");
  if (e.id < 0 || edges_.count(e.id) != 0) e.id = next_edge_id_;
  next_edge_id_ = std::max(next_edge_id_, e.id + 1);
  const EdgeId id = e.id;
  vertices_.at(e.start).edge_ids.insert(id);
  vertices_.at(e.end).edge_ids.insert(id);
  edges_.emplace(id, std::move(e));
  return id;
}

void SparseGraph::remove_edge(EdgeId id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) return;
  vertices_.at(it->second.start).edge_ids.erase(id);
  vertices_.at(it->second.end).edge_ids.erase(id);
  edges_.erase(it);
}

void SparseGraph::remove_vertex(VertexId id) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) return;
  const std::set<EdgeId> incident = it->second.edge_ids;
  for (EdgeId e : incident) remove_edge(e);
  vertices_.erase(id);
}

std::vector<EdgeId> SparseGraph::edges_between(VertexId a, VertexId b) const {
  std::vector<EdgeId> out;
  auto it = vertices_.find(a);
  if (it == vertices_.end()) return out;
  for (EdgeId e : it->second.edge_ids) {
    const SparseEdge& edge = edges_.at(e);
    if ((edge.start == a && edge.end == b) || (edge.start == b && edge.end == a)) out.push_back(e);
  }
  return out;
}

VertexId SparseGraph::other_end(EdgeId edge, VertexId from) const {
  const SparseEdge& e = edges_.at(edge);
  return e.start == from ? e.end : e.start;
}

int SparseGraph::label_subgraphs() {
  for (auto& [_, v] : vertices_) v.subgraph_id = -1;
  int label = 0;
  for (auto& [id, v] : vertices_) {
    if (v.subgraph_id >= 0) continue;
    std::vector<VertexId> stack{id};
    v.subgraph_id = label;
    while (!stack.empty()) {
      const VertexId cur = stack.back();
      stack.pop_back();
      for (EdgeId e : vertices_.at(cur).edge_ids) {
        SparseVertex& next = vertices_.at(other_end(e, cur));
        if (next.subgraph_id >= 0) continue;
        next.subgraph_id = label;
        stack.push_back(next.id);
      }
    }
    ++label;
  }
  return label;
}

void GraphConfig::validate() const {
  if (!(r_prune > 0.0)) throw std::invalid_argument("r_prune must be positive");
  if (max_edge_deviation && !(*max_edge_deviation > 0.0))
    throw std::invalid_argument("max_edge_deviation must be positive");
  if (!(robot_radius > 0.0)) throw std::invalid_argument("robot_radius must be positive");
  if (max_split_passes < 1) throw std::invalid_argument("max_split_passes must be at least 1");
}

double GraphConfig::deviation_threshold(double voxel_size) const {
  return max_edge_deviation.value_or(2.0 * voxel_size);
}

// ---------------------------------------------------------------------------
// Vertices

bool is_vertex_neighborhood(Neighborhood diagram) {
  const int neighbors = std::popcount(diagram & kFullMask & ~kCenterMask);
  return neighbors == 1 || neighbors > 3;
}

std::vector<SparseVertex> extract_vertices(SkeletonLayer& skeleton) {
  std::vector<GridIndex> found;
  skeleton.for_each([&](const GridIndex& idx, const SkeletonVoxel& v) {
    if (v.on_diagram() && is_vertex_neighborhood(diagram_neighborhood(skeleton, idx))) found.push_back(idx);
  });
  std::vector<SparseVertex> out;
  out.reserve(found.size());
  for (const GridIndex& idx : found) {
    SparseVertex v = vertex_at(skeleton, idx);
    v.id = static_cast<VertexId>(out.size());
    set_vertex_flag(skeleton, idx, v.id);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<SparseVertex> prune_vertices(const std::vector<SparseVertex>& vertices, double r_prune) {
  std::vector<Point> points;
  points.reserve(vertices.size());
  for (const auto& v : vertices) points.push_back(v.position);
  const KdTree tree(std::move(points));

  std::vector<std::size_t> order(vertices.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (vertices[a].distance != vertices[b].distance) return vertices[a].distance > vertices[b].distance;
    return vertices[a].voxel < vertices[b].voxel;
  });

  std::vector<bool> removed(vertices.size(), false);
  std::vector<bool> kept(vertices.size(), false);
  for (std::size_t i : order) {
    if (removed[i]) continue;
    kept[i] = true;
    for (std::size_t j : tree.radius_search(vertices[i].position, r_prune))
      if (j != i && !kept[j]) removed[j] = true;
  }
  std::vector<SparseVertex> out;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (kept[i]) out.push_back(vertices[i]);
  return out;
}

void mark_vertices(SkeletonLayer& skeleton, const std::vector<SparseVertex>& vertices) {
  skeleton.for_each_mutable([](const GridIndex&, SkeletonVoxel& v) {
    v.is_vertex = false;
    v.vertex_id.reset();
  });
  for (const auto& v : vertices) {
    SkeletonVoxel& sv = skeleton.at(v.voxel);
    sv.is_vertex = true;
    sv.vertex_id = v.id;
  }
}

// ---------------------------------------------------------------------------
// Edge following

double route_difference(const std::vector<GridIndex>& a, const std::vector<GridIndex>& b) {
  const VoxelSet sa(a.begin(), a.end());
  const VoxelSet sb(b.begin(), b.end());
  std::size_t shared = 0;
  for (const GridIndex& g : sa) shared += sb.count(g);
  const std::size_t total = sa.size() + sb.size() - shared;
  return total == 0 ? 0.0 : 1.0 - static_cast<double>(shared) / static_cast<double>(total);
}

namespace {

struct Branch {
  GridIndex voxel;
  GridIndex step;        // v_d: offset taken to reach `voxel`
  std::size_t depth = 0;  // route length before `voxel`
};

/// One walk from `origin` entering the diagram at `first`. Returns the route
/// up to the first other vertex, or nothing if the walk dead-ends.
std::optional<std::pair<VertexId, std::vector<GridIndex>>> walk_edge(
    const SkeletonLayer& skeleton, const std::unordered_map<GridIndex, VertexId, GridIndexHash>& vertex_at_voxel,
    VertexId origin_id, const GridIndex& origin, const GridIndex& first) {
  auto vertex_id = [&](const GridIndex& g) -> std::optional<VertexId> {
    auto it = vertex_at_voxel.find(g);
    if (it == vertex_at_voxel.end() || it->second == origin_id) return std::nullopt;
    return it->second;
  };

  std::vector<GridIndex> route{origin};
  VoxelSet visited{origin};
  // Other diagram cells around the origin belong to its other branches.
  for (const GridIndex& n : neighbors26(origin))
    if (n != first && on_diagram(skeleton, n)) visited.insert(n);

  std::vector<Branch> stack{{first, first - origin, 1}};
  while (!stack.empty()) {
    const Branch b = stack.back();
    stack.pop_back();
    if (visited.count(b.voxel) != 0) continue;
    route.resize(b.depth);
    route.push_back(b.voxel);
    visited.insert(b.voxel);
    if (auto id = vertex_id(b.voxel)) return std::make_pair(*id, route);

    const Point v_d = normalized(b.step);
    const GridIndex r_offset = b.voxel - origin;
    const Point r_d = r_offset.is_zero() ? Point::Zero() : normalized(r_offset);

    struct Candidate {
      GridIndex voxel;
      GridIndex step;
      bool vertex;
      double score;
      double alignment;
    };
    std::vector<Candidate> candidates;
    for (const GridIndex& o : offsets26()) {
      const GridIndex n = b.voxel + o;
      if (visited.count(n) != 0 || !on_diagram(skeleton, n)) continue;
      const Point n_d = normalized(o);
      candidates.push_back({n, o, vertex_id(n).has_value(), (v_d - r_d).dot(-n_d), v_d.dot(n_d)});
    }
    // Best candidate last so it is popped first: vertices, then lowest
    // score, then the step most in line with the current direction.
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& c) {
      if (a.vertex != c.vertex) return !a.vertex;
      if (a.score != c.score) return a.score > c.score;
      return a.alignment < c.alignment;
    });
    for (const Candidate& c : candidates) stack.push_back({c.voxel, c.step, route.size()});
  }
  return std::nullopt;
}

}  // namespace

std::vector<SparseEdge> follow_edges(const SkeletonLayer& skeleton, const std::vector<SparseVertex>& vertices,
                                     double min_route_difference) {
  std::unordered_map<GridIndex, VertexId, GridIndexHash> vertex_at_voxel;
  for (const auto& v : vertices) vertex_at_voxel[v.voxel] = v.id;

  std::vector<SparseEdge> edges;
  std::map<std::pair<VertexId, VertexId>, std::vector<std::size_t>> by_pair;
  for (const auto& v : vertices) {
    for (const GridIndex& first : neighbors26(v.voxel)) {
      if (!on_diagram(skeleton, first)) continue;
      auto found = walk_edge(skeleton, vertex_at_voxel, v.id, v.voxel, first);
      if (!found) continue;
      auto& [target, route] = *found;
      const auto key = std::minmax(v.id, target);
      auto& existing = by_pair[{key.first, key.second}];
      const bool duplicate = std::any_of(existing.begin(), existing.end(), [&](std::size_t i) {
        return route_difference(edges[i].diagram_path, route) <= min_route_difference;
      });
      if (duplicate) continue;
      SparseEdge e = make_edge(v.id, target, std::move(route));
      e.id = static_cast<EdgeId>(edges.size());
      existing.push_back(edges.size());
      edges.push_back(std::move(e));
    }
  }
  return edges;
}

// ---------------------------------------------------------------------------
// Diagram search and splitting

std::optional<DiagramPath> diagram_astar(const SkeletonLayer& skeleton, const GridIndex& start,
                                         const GridIndex& goal) {
  if (!on_diagram(skeleton, start) || !on_diagram(skeleton, goal)) return std::nullopt;
  const Point target = goal.cast();
  auto result = grid_astar(
      start, [&](const GridIndex& g) { return on_diagram(skeleton, g); },
      [&](const GridIndex& g) { return (g.cast() - target).norm(); }, [&](const GridIndex& g) { return g == goal; });
  if (!result.found) return std::nullopt;
  return DiagramPath{std::move(result.path), result.cost * skeleton.voxel_size()};
}

Deviation max_deviation(const std::vector<GridIndex>& route, double voxel_size) {
  Deviation out;
  if (route.size() < 3) return out;
  const Point a = route.front().cast();
  const Point ab = route.back().cast() - a;
  const double len2 = ab.squaredNorm();
  for (std::size_t i = 1; i + 1 < route.size(); ++i) {
    const Point p = route[i].cast();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const double d = (p - (a + t * ab)).norm() * voxel_size;
    if (d > out.distance) out = {d, i};
  }
  return out;
}

SplitStats split_edges(SparseGraph& graph, SkeletonLayer& skeleton, const GraphConfig& config) {
  SplitStats stats;
  const double vs = skeleton.voxel_size();
  const double threshold = config.deviation_threshold(vs);

  for (stats.passes = 1; stats.passes <= config.max_split_passes; ++stats.passes) {
    bool changed = false;
    std::vector<EdgeId> ids;
    for (const auto& [id, _] : graph.edges()) ids.push_back(id);

    for (EdgeId id : ids) {
      if (graph.edges().count(id) == 0) continue;
      SparseEdge edge = graph.edge(id);
      const SparseVertex& start = graph.vertex(edge.start);
      const SparseVertex& end = graph.vertex(edge.end);
      if (edge.diagram_path.empty()) {
        auto path = diagram_astar(skeleton, start.voxel, end.voxel);
        if (!path) continue;
        graph.edge(id).diagram_path = path->voxels;
        edge.diagram_path = std::move(path->voxels);
      }
      const Deviation dev = max_deviation(edge.diagram_path, vs);
      if (dev.distance <= threshold) continue;
      const GridIndex split_voxel = edge.diagram_path[dev.index];
      const Point split_point = skeleton.center(split_voxel);

      std::vector<std::pair<double, VertexId>> nearby;
      for (const auto& [vid, v] : graph.vertices()) {
        if (vid == edge.start || vid == edge.end) continue;
        const double d = (v.position - split_point).norm();
        if (d <= config.r_prune) nearby.push_back({d, vid});
      }
      std::sort(nearby.begin(), nearby.end());

      bool reconnected = false;
      for (const auto& [_, vid] : nearby) {
        const GridIndex via = graph.vertex(vid).voxel;
        auto first = diagram_astar(skeleton, start.voxel, via);
        auto second = first ? diagram_astar(skeleton, via, end.voxel) : std::nullopt;
        if (!second) continue;
        const double worst = std::max(max_deviation(first->voxels, vs).distance,
                                      max_deviation(second->voxels, vs).distance);
        if (worst >= dev.distance) continue;
        const VertexId a = edge.start;
        const VertexId b = edge.end;
        graph.remove_edge(id);
        if (!has_similar_edge(graph, a, vid, first->voxels, config.min_route_difference)) {
          SparseEdge e = make_edge(a, vid, std::move(first->voxels));
          e.repair = edge.repair;
          graph.add_edge(std::move(e));
        }
        if (!has_similar_edge(graph, vid, b, second->voxels, config.min_route_difference)) {
          SparseEdge e = make_edge(vid, b, std::move(second->voxels));
          e.repair = edge.repair;
          graph.add_edge(std::move(e));
        }
        ++stats.reconnections;
        reconnected = true;
        break;
      }
      if (!reconnected) {
        VertexId vid;
        const SkeletonVoxel* existing = skeleton.find(split_voxel);
        if (existing != nullptr && existing->vertex_id && graph.has_vertex(*existing->vertex_id)) {
          vid = *existing->vertex_id;
        } else {
          vid = graph.add_vertex(vertex_at(skeleton, split_voxel));
          set_vertex_flag(skeleton, split_voxel, vid);
          ++stats.vertices_added;
        }
        std::vector<GridIndex> head(edge.diagram_path.begin(), edge.diagram_path.begin() + dev.index + 1);
        std::vector<GridIndex> tail(edge.diagram_path.begin() + dev.index, edge.diagram_path.end());
        graph.remove_edge(id);
        SparseEdge e1 = make_edge(edge.start, vid, std::move(head));
        SparseEdge e2 = make_edge(vid, edge.end, std::move(tail));
        e1.repair = e2.repair = edge.repair;
        graph.add_edge(std::move(e1));
        graph.add_edge(std::move(e2));
      }
      changed = true;
    }
    if (!changed) break;
  }
  stats.passes = std::min(stats.passes, config.max_split_passes);
  return stats;
}

// ---------------------------------------------------------------------------
// Repair

RepairStats repair_subgraphs(SparseGraph& graph, SkeletonLayer& skeleton, const GraphConfig& config) {
  RepairStats stats;
  std::vector<VertexId> lonely;
  for (const auto& [id, v] : graph.vertices())
    if (v.edge_ids.empty()) lonely.push_back(id);
  for (VertexId id : lonely) {
    set_vertex_flag(skeleton, graph.vertex(id).voxel, std::nullopt);
    graph.remove_vertex(id);
    ++stats.removed_vertices;
  }

  std::unordered_map<GridIndex, VertexId, GridIndexHash> vertex_at_voxel;
  for (const auto& [id, v] : graph.vertices()) vertex_at_voxel[v.voxel] = id;

  std::set<std::pair<VertexId, VertexId>> unreachable;
  int labels = graph.label_subgraphs();
  bool progress = true;
  while (labels > 1 && progress) {
    progress = false;
    std::map<int, VertexId> representative;
    for (const auto& [id, v] : graph.vertices()) representative.emplace(v.subgraph_id, id);
    std::vector<VertexId> reps;
    for (const auto& [_, id] : representative) reps.push_back(id);

    for (std::size_t i = 0; i < reps.size() && !progress; ++i) {
      for (std::size_t j = i + 1; j < reps.size() && !progress; ++j) {
        if (unreachable.count({reps[i], reps[j]}) != 0) continue;
        auto path = diagram_astar(skeleton, graph.vertex(reps[i]).voxel, graph.vertex(reps[j]).voxel);
        if (!path) {
          unreachable.insert({reps[i], reps[j]});
          continue;
        }
        VertexId last = reps[i];
        std::size_t last_index = 0;
        for (std::size_t k = 1; k < path->voxels.size(); ++k) {
          auto it = vertex_at_voxel.find(path->voxels[k]);
          if (it == vertex_at_voxel.end()) continue;
          const VertexId here = it->second;
          if (graph.vertex(here).subgraph_id != graph.vertex(last).subgraph_id) {
            SparseEdge e = make_edge(last, here,
                                     std::vector<GridIndex>(path->voxels.begin() + last_index,
                                                            path->voxels.begin() + k + 1));
            e.repair = true;
            graph.add_edge(std::move(e));
            ++stats.added_edges;
            labels = graph.label_subgraphs();
            progress = true;
          }
          last = here;
          last_index = k;
        }
      }
    }
  }
  if (stats.added_edges > 0) split_edges(graph, skeleton, config);
  stats.components = graph.label_subgraphs();
  return stats;
}

void compute_edge_clearance(SparseGraph& graph, const EsdfLayer& esdf, double robot_radius) {
  std::vector<EdgeId> ids;
  for (const auto& [id, _] : graph.edges()) ids.push_back(id);
  for (EdgeId id : ids) {
    SparseEdge& e = graph.edge(id);
    e.min_clearance = segment_min_clearance(esdf, graph.vertex(e.start).position, graph.vertex(e.end).position,
                                            0.5 * esdf.voxel_size());
    e.flagged = e.min_clearance < robot_radius;
  }
}

SparseGraph build_sparse_graph(SkeletonLayer& skeleton, const EsdfLayer& esdf, const GraphConfig& config,
                               GraphBuildTimings* timings) {
  config.validate();
  GraphBuildTimings local;
  auto t0 = Clock::now();
  const std::vector<SparseVertex> pruned = prune_vertices(extract_vertices(skeleton), config.r_prune);
  mark_vertices(skeleton, pruned);
  local.vertices_s = seconds_since(t0);

  t0 = Clock::now();
  SparseGraph graph(skeleton.voxel_size());
  for (const auto& v : pruned) graph.add_vertex(v);
  for (auto& e : follow_edges(skeleton, pruned, config.min_route_difference)) {
    e.id = -1;
    graph.add_edge(std::move(e));
  }
  local.edges_s = seconds_since(t0);

  t0 = Clock::now();
  split_edges(graph, skeleton, config);
  local.splitting_s = seconds_since(t0);

  t0 = Clock::now();
  repair_subgraphs(graph, skeleton, config);
  compute_edge_clearance(graph, esdf, config.robot_radius);
  local.repair_s = seconds_since(t0);

  if (timings != nullptr) *timings = local;
  return graph;
}

void attach_vertex_ids(SkeletonLayer& skeleton, const SparseGraph& graph) {
  skeleton.for_each_mutable([](const GridIndex&, SkeletonVoxel& v) {
    v.is_vertex = false;
    v.vertex_id.reset();
  });
  for (const auto& [id, v] : graph.vertices()) {
    SkeletonVoxel& sv = skeleton.at(v.voxel);
    sv.is_vertex = true;
    sv.vertex_id = id;
  }
}

int diagram_components_with_vertices(const SkeletonLayer& skeleton, int min_vertices) {
  VoxelSet seen;
  int count = 0;
  skeleton.for_each([&](const GridIndex& idx, const SkeletonVoxel& v) {
    if (!v.on_diagram() || seen.count(idx) != 0) return;
    int vertices = 0;
    std::vector<GridIndex> stack{idx};
    seen.insert(idx);
    while (!stack.empty()) {
      const GridIndex cur = stack.back();
      stack.pop_back();
      if (skeleton.find(cur)->is_vertex) ++vertices;
      for (const GridIndex& n : neighbors26(cur))
        if (on_diagram(skeleton, n) && seen.insert(n).second) stack.push_back(n);
    }
    if (vertices >= min_vertices) ++count;
  });
  return count;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json graph_to_json(const SparseGraph& graph) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& [id, v] : graph.vertices()) {
    vertices.push_back({{"id", id},
                        {"position", {v.position.x(), v.position.y(), v.position.z()}},
                        {"distance", v.distance},
                        {"subgraph", v.subgraph_id},
                        {"voxel", {v.voxel.x, v.voxel.y, v.voxel.z}}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [id, e] : graph.edges()) {
    nlohmann::json path = nlohmann::json::array();
    for (const GridIndex& g : e.diagram_path) path.push_back({g.x, g.y, g.z});
    edges.push_back({{"id", id},
                     {"start", e.start},
                     {"end", e.end},
                     {"diagram_path", std::move(path)},
                     {"min_clearance", e.min_clearance},
                     {"flagged", e.flagged},
                     {"repair", e.repair}});
  }
  return {{"voxel_size", graph.voxel_size()}, {"vertices", std::move(vertices)}, {"edges", std::move(edges)}};
}

SparseGraph graph_from_json(const nlohmann::json& j) {
  SparseGraph graph(j.at("voxel_size").get<double>());
  for (const auto& jv : j.at("vertices")) {
    SparseVertex v;
    v.id = jv.at("id").get<VertexId>();
    const auto& p = jv.at("position");
    v.position = Point(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    v.distance = jv.at("distance").get<double>();
    v.subgraph_id = jv.value("subgraph", -1);
    if (jv.contains("voxel")) {
      const auto& g = jv.at("voxel");
      v.voxel = {g.at(0).get<int>(), g.at(1).get<int>(), g.at(2).get<int>()};
    } else {
      v.voxel = position_to_index(v.position, graph.voxel_size());
    }
    if (graph.has_vertex(v.id)) throw std::invalid_argument("duplicate vertex id");
    graph.add_vertex(std::move(v));
  }
  for (const auto& je : j.at("edges")) {
    SparseEdge e;
    e.id = je.at("id").get<EdgeId>();
    e.start = je.at("start").get<VertexId>();
    e.end = je.at("end").get<VertexId>();
    if (je.contains("diagram_path"))
      for (const auto& g : je.at("diagram_path")) e.diagram_path.push_back({g.at(0), g.at(1), g.at(2)});
    e.min_clearance = je.value("min_clearance", 0.0);
    e.flagged = je.value("flagged", false);
    e.repair = je.value("repair", false);
    if (graph.edges().count(e.id) != 0) throw std::invalid_argument("duplicate edge id");
    graph.add_edge(std::move(e));
  }
  return graph;
}

void save_graph(const std::string& path, const SparseGraph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << graph_to_json(graph).dump(1) << '\n';
}

SparseGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return graph_from_json(nlohmann::json::parse(in));
}

void export_graph_ply(const std::string& path, const SparseGraph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::map<VertexId, std::size_t> row;
  for (const auto& [id, _] : graph.vertices()) row.emplace(id, row.size());
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << graph.vertices().size() << "\n"
      << "property float x\nproperty float y\nproperty float z\nproperty float distance\n"
      << "element edge " << graph.edges().size() << "\n"
      << "property int vertex1\nproperty int vertex2\nend_header\n";
  for (const auto& [_, v] : graph.vertices())
    out << v.position.x() << ' ' << v.position.y() << ' ' << v.position.z() << ' ' << v.distance << '\n';
  for (const auto& [_, e] : graph.edges()) out << row.at(e.start) << ' ' << row.at(e.end) << '\n';
}

}  // namespace skelplan
