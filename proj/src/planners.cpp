#include "skelplan/planners.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <unordered_map>

#include "skelplan/collision.hpp"
#include "skelplan/grid_search.hpp"
#include "skelplan/world_sim.hpp"

namespace skelplan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double voxel_distance(const EsdfLayer& esdf, const GridIndex& g) {
  const EsdfVoxel* v = esdf.find(g);
  if (v == nullptr || !v->observed) return -std::numeric_limits<double>::infinity();
  return v->distance;
}

void check_endpoints(const EsdfLayer& esdf, const PlanRequest& request) {
  request.validate();
  if (!(esdf_distance_at(esdf, request.start) > request.robot_radius) ||
      !(esdf_distance_at(esdf, request.goal) > request.robot_radius))
    throw InvalidEndpointError();
}

void push_unique(std::vector<Point>& out, const Point& p) {
  if (out.empty() || out.back() != p) out.push_back(p);
}

void finish(PlanResult& result, Clock::time_point t0) {
  result.solve_time = seconds_since(t0);
  if (result.success) {
    result.path_length = path_length(result.waypoints);
    result.solution_vertices = result.waypoints.size();
  }
}

bool trivial_query(const PlanRequest& request, PlanResult& result) {
  if (request.start != request.goal) return false;
  result.success = true;
  result.waypoints = {request.start};
  return true;
}

/// Waypoints start, voxel centers..., goal.
std::vector<Point> voxel_waypoints(const EsdfLayer& esdf, const Point& start, const std::vector<GridIndex>& voxels,
                                   const Point& goal) {
  std::vector<Point> out{start};
  for (const GridIndex& g : voxels) push_unique(out, esdf.center(g));
  push_unique(out, goal);
  return out;
}

}  // namespace

void PlanRequest::validate() const {
  if (!start.allFinite() || !goal.allFinite()) throw std::invalid_argument("endpoints must be finite");
  if (!(robot_radius > 0.0)) throw std::invalid_argument("robot_radius must be positive");
  if (!(time_limit > 0.0)) throw std::invalid_argument("time_limit must be positive");
}

double path_length(const std::vector<Point>& waypoints) {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) total += (waypoints[i] - waypoints[i - 1]).norm();
  return total;
}

nlohmann::json plan_result_to_json(const PlanResult& result) {
  nlohmann::json waypoints = nlohmann::json::array();
  for (const Point& p : result.waypoints) waypoints.push_back({p.x(), p.y(), p.z()});
  nlohmann::json j{{"planner", result.planner},
                   {"success", result.success},
                   {"waypoints", std::move(waypoints)},
                   {"path_length", result.path_length},
                   {"solve_time", result.solve_time},
                   {"solution_vertices", result.solution_vertices},
                   {"expansions", result.expansions}};
  j["first_solution_time"] = result.first_solution_time ? nlohmann::json(*result.first_solution_time) : nullptr;
  j["first_solution_length"] =
      result.first_solution_length ? nlohmann::json(*result.first_solution_length) : nullptr;
  return j;
}

// ---------------------------------------------------------------------------
// Grid searches

PlanResult astar_esdf(const EsdfLayer& esdf, const PlanRequest& request) {
  const auto t0 = Clock::now();
  PlanResult result;
  result.planner = "esdf_astar";
  check_endpoints(esdf, request);
  if (!trivial_query(request, result)) {
    const GridIndex s = esdf.index_of(request.start);
    const GridIndex g = esdf.index_of(request.goal);
    const Point target = g.cast();
    auto search = grid_astar(
        s, [&](const GridIndex& i) { return voxel_distance(esdf, i) > request.robot_radius; },
        [&](const GridIndex& i) { return (i.cast() - target).norm(); }, [&](const GridIndex& i) { return i == g; });
    result.expansions = search.expansions;
    if (search.found) {
      result.success = true;
      result.waypoints = voxel_waypoints(esdf, request.start, search.path, request.goal);
    }
  }
  finish(result, t0);
  return result;
}

PlanResult astar_diagram(const EsdfLayer& esdf, const SkeletonLayer& skeleton, const PlanRequest& request) {
  const auto t0 = Clock::now();
  PlanResult result;
  result.planner = "diagram_astar";
  check_endpoints(esdf, request);
  if (trivial_query(request, result)) {
    finish(result, t0);
    return result;
  }
  const double r = request.robot_radius;
  auto free = [&](const GridIndex& i) { return voxel_distance(esdf, i) > r; };
  auto on_diagram = [&](const GridIndex& i) {
    const SkeletonVoxel* v = skeleton.find(i);
    return v != nullptr && v->on_diagram() && free(i);
  };

  const GridIndex s = esdf.index_of(request.start);
  const GridIndex g = esdf.index_of(request.goal);
  auto toward = [](const GridIndex& target) {
    return [p = target.cast()](const GridIndex& i) { return (i.cast() - p).norm(); };
  };
  const auto head = grid_astar(s, free, toward(g), on_diagram);
  result.expansions += head.expansions;
  if (head.found) {
    const auto tail = grid_astar(g, free, toward(s), on_diagram);
    result.expansions += tail.expansions;
    if (tail.found) {
      const GridIndex a = head.path.back();
      const GridIndex b = tail.path.back();
      const auto middle = grid_astar(a, on_diagram, toward(b), [&](const GridIndex& i) { return i == b; });
      result.expansions += middle.expansions;
      if (middle.found) {
        std::vector<GridIndex> voxels = head.path;
        voxels.insert(voxels.end(), middle.path.begin() + 1, middle.path.end());
        voxels.insert(voxels.end(), tail.path.rbegin() + 1, tail.path.rend());
        result.success = true;
        result.waypoints = voxel_waypoints(esdf, request.start, voxels, request.goal);
      }
    }
  }
  finish(result, t0);
  return result;
}

// ---------------------------------------------------------------------------
// Sparse graph

namespace {

KdTree vertex_tree(const SparseGraph& graph, std::vector<VertexId>& ids) {
  std::vector<Point> points;
  for (const auto& [id, v] : graph.vertices()) {
    ids.push_back(id);
    points.push_back(v.position);
  }
  return KdTree(std::move(points));
}

}  // namespace

SparseGraphPlanner::SparseGraphPlanner(const SparseGraph& graph, const EsdfLayer& esdf, SparsePlannerConfig config)
    : graph_(graph), esdf_(esdf), config_(config), tree_(vertex_tree(graph, ids_)) {}

std::optional<VertexId> SparseGraphPlanner::attach(const Point& p, double radius) const {
  for (std::size_t i : tree_.knn_search(p, config_.attach_candidates)) {
    const VertexId id = ids_[i];
    if (segment_is_free(esdf_, p, graph_.vertex(id).position, radius)) return id;
  }
  return std::nullopt;
}

PlanResult SparseGraphPlanner::plan(const PlanRequest& request) const {
  const auto t0 = Clock::now();
  PlanResult result;
  result.planner = "sparse_astar";
  check_endpoints(esdf_, request);
  if (trivial_query(request, result)) {
    finish(result, t0);
    return result;
  }
  const auto from = attach(request.start, request.robot_radius);
  const auto to = from ? attach(request.goal, request.robot_radius) : std::nullopt;
  if (!to) {
    finish(result, t0);
    return result;
  }

  struct Entry {
    double f;
    double h;
    VertexId id;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      return id > o.id;
    }
  };
  const Point goal_pos = graph_.vertex(*to).position;
  auto heuristic = [&](VertexId id) { return (graph_.vertex(id).position - goal_pos).norm(); };
  std::unordered_map<VertexId, std::pair<double, VertexId>> best;  // g, parent
  std::unordered_map<VertexId, bool> closed;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  best[*from] = {0.0, *from};
  open.push({heuristic(*from), heuristic(*from), *from});
  bool found = false;
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (closed[top.id]) continue;
    closed[top.id] = true;
    ++result.expansions;
    if (top.id == *to) {
      found = true;
      break;
    }
    const SparseVertex& v = graph_.vertex(top.id);
    const double g = best.at(top.id).first;
    for (EdgeId eid : v.edge_ids) {
      const SparseEdge& e = graph_.edge(eid);
      if (e.min_clearance < request.robot_radius || (config_.skip_flagged && e.flagged)) continue;
      const VertexId next = e.start == top.id ? e.end : e.start;
      if (closed[next]) continue;
      const double candidate = g + (graph_.vertex(next).position - v.position).norm();
      auto it = best.find(next);
      if (it != best.end() && it->second.first <= candidate) continue;
      best[next] = {candidate, top.id};
      const double h = heuristic(next);
      open.push({candidate + h, h, next});
    }
  }
  if (found) {
    std::vector<VertexId> chain;
    for (VertexId at = *to;; at = best.at(at).second) {
      chain.push_back(at);
      if (at == *from) break;
    }
    result.success = true;
    result.waypoints = {request.start};
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) push_unique(result.waypoints, graph_.vertex(*it).position);
    push_unique(result.waypoints, request.goal);
  }
  finish(result, t0);
  return result;
}

PlanResult astar_sparse(const SparseGraph& graph, const EsdfLayer& esdf, const PlanRequest& request) {
  return SparseGraphPlanner(graph, esdf).plan(request);
}

// ---------------------------------------------------------------------------
// Sampling planners

namespace {

struct TreeNode {
  Point p;
  int parent;
  double cost;
};

Aabb sampling_bounds(const EsdfLayer& esdf) {
  const auto blocks = esdf.sorted_blocks();
  if (blocks.empty()) throw std::invalid_argument("empty map");
  GridIndex lo = blocks.front();
  GridIndex hi = blocks.front();
  for (const GridIndex& b : blocks) {
    lo = {std::min(lo.x, b.x), std::min(lo.y, b.y), std::min(lo.z, b.z)};
    hi = {std::max(hi.x, b.x), std::max(hi.y, b.y), std::max(hi.z, b.z)};
  }
  const double side = kBlockSide * esdf.voxel_size();
  return {lo.cast() * side, (hi.cast().array() + 1.0).matrix() * side};
}

class Sampler {
 public:
  Sampler(const EsdfLayer& esdf, const PlanRequest& request)
      : esdf_(esdf), radius_(request.robot_radius), bounds_(sampling_bounds(esdf)), rng_(request.rng_seed) {}

  /// Uniform point with clearance; counts every draw.
  Point free_sample(std::size_t& draws) {
    for (;;) {
      ++draws;
      Point p;
      for (int k = 0; k < 3; ++k) p[k] = std::uniform_real_distribution<double>(bounds_.min[k], bounds_.max[k])(rng_);
      if (esdf_distance_at(esdf_, p) >= radius_) return p;
    }
  }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  const Aabb& bounds() const { return bounds_; }

 private:
  const EsdfLayer& esdf_;
  double radius_;
  Aabb bounds_;
  std::mt19937_64 rng_;
};

int nearest(const std::vector<TreeNode>& tree, const Point& p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const double d = (tree[i].p - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Point steer(const Point& from, const Point& to, double step) {
  const Point d = to - from;
  const double n = d.norm();
  return n <= step ? to : Point(from + d * (step / n));
}

std::vector<Point> trace(const std::vector<TreeNode>& tree, int node) {
  std::vector<Point> out;
  for (int at = node; at >= 0; at = tree[at].parent) out.push_back(tree[at].p);
  std::reverse(out.begin(), out.end());
  return out;
}

bool out_of_budget(const RrtConfig& config, std::size_t iterations, Clock::time_point t0, double limit) {
  if (config.max_iterations != 0 && iterations >= config.max_iterations) return true;
  return seconds_since(t0) >= limit;
}

}  // namespace

PlanResult rrt_connect(const EsdfLayer& esdf, const PlanRequest& request, const RrtConfig& config) {
  const auto t0 = Clock::now();
  PlanResult result;
  result.planner = "rrt_connect";
  check_endpoints(esdf, request);
  if (trivial_query(request, result)) {
    finish(result, t0);
    return result;
  }
  const double r = request.robot_radius;
  const double step = config.step_voxels * esdf.voxel_size();
  Sampler sampler(esdf, request);
  std::vector<TreeNode> trees[2] = {{{request.start, -1, 0.0}}, {{request.goal, -1, 0.0}}};
  int a = 0;
  std::size_t iterations = 0;

  while (!result.success && !out_of_budget(config, iterations, t0, request.time_limit)) {
    ++iterations;
    const Point target = sampler.free_sample(result.expansions);
    std::vector<TreeNode>& ta = trees[a];
    std::vector<TreeNode>& tb = trees[1 - a];
    const int near_a = nearest(ta, target);
    const Point q_new = steer(ta[near_a].p, target, step);
    if (segment_is_free(esdf, ta[near_a].p, q_new, r)) {
      ta.push_back({q_new, near_a, 0.0});
      // Greedy connect of the other tree toward the new node.
      int cur = nearest(tb, q_new);
      for (;;) {
        const Point next = steer(tb[cur].p, q_new, step);
        if (!segment_is_free(esdf, tb[cur].p, next, r)) break;
        tb.push_back({next, cur, 0.0});
        cur = static_cast<int>(tb.size()) - 1;
        if (next == q_new) {
          std::vector<Point> half_a = trace(ta, static_cast<int>(ta.size()) - 1);
          std::vector<Point> half_b = trace(tb, cur);
          std::vector<Point>& from_start = a == 0 ? half_a : half_b;
          std::vector<Point>& from_goal = a == 0 ? half_b : half_a;
          result.waypoints = from_start;
          for (auto it = from_goal.rbegin(); it != from_goal.rend(); ++it) push_unique(result.waypoints, *it);
          result.success = true;
          break;
        }
      }
    }
    a = 1 - a;
  }
  finish(result, t0);
  return result;
}

PlanResult rrt_star(const EsdfLayer& esdf, const PlanRequest& request, const RrtConfig& config) {
  const auto t0 = Clock::now();
  PlanResult result;
  result.planner = "rrt_star";
  check_endpoints(esdf, request);
  if (trivial_query(request, result)) {
    result.first_solution_time = 0.0;
    result.first_solution_length = 0.0;
    result.first_solution_vertices = 1;
    finish(result, t0);
    return result;
  }
  const double r = request.robot_radius;
  const double step = config.step_voxels * esdf.voxel_size();
  Sampler sampler(esdf, request);
  const Point extent = sampler.bounds().size();
  const double volume = extent.x() * extent.y() * extent.z();
  const double gamma = 2.0 * std::cbrt(1.0 + 1.0 / 3.0) * std::cbrt(volume / (4.0 / 3.0 * M_PI));

  std::vector<TreeNode> tree{{request.start, -1, 0.0}};
  std::vector<std::vector<int>> children(1);
  std::vector<int> goal_parents;  // nodes with a free straight segment to the goal
  std::size_t iterations = 0;

  auto best_goal_parent = [&]() {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int n : goal_parents) {
      const double c = tree[n].cost + (tree[n].p - request.goal).norm();
      if (c < best_cost) {
        best_cost = c;
        best = n;
      }
    }
    return std::make_pair(best, best_cost);
  };
  auto propagate = [&](int root) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      for (int c : children[n]) {
        tree[c].cost = tree[n].cost + (tree[c].p - tree[n].p).norm();
        stack.push_back(c);
      }
    }
  };
  auto try_goal = [&](int node) {
    if ((tree[node].p - request.goal).norm() <= step && segment_is_free(esdf, tree[node].p, request.goal, r)) {
      goal_parents.push_back(node);
      if (!result.first_solution_time) {
        result.first_solution_time = seconds_since(t0);
        result.first_solution_length = tree[node].cost + (tree[node].p - request.goal).norm();
        result.first_solution_vertices = trace(tree, node).size() + 1;
      }
    }
  };
  try_goal(0);

  while (!out_of_budget(config, iterations, t0, request.time_limit)) {
    if (config.stop_at_first_solution && result.first_solution_time) break;
    ++iterations;
    Point target;
    if (sampler.uniform() < config.goal_bias) {
      target = request.goal;
      ++result.expansions;
    } else {
      target = sampler.free_sample(result.expansions);
    }
    const int near = nearest(tree, target);
    const Point q_new = steer(tree[near].p, target, step);
    if (q_new == tree[near].p || !segment_is_free(esdf, tree[near].p, q_new, r)) continue;

    const double n = static_cast<double>(tree.size());
    const double radius = std::min(step, gamma * std::cbrt(std::log(n + 1.0) / (n + 1.0)));
    std::vector<int> neighbors;
    for (std::size_t i = 0; i < tree.size(); ++i)
      if ((tree[i].p - q_new).norm() <= radius) neighbors.push_back(static_cast<int>(i));

    int parent = near;
    double cost = tree[near].cost + (q_new - tree[near].p).norm();
    for (int c : neighbors) {
      const double via = tree[c].cost + (q_new - tree[c].p).norm();
      if (via < cost && segment_is_free(esdf, tree[c].p, q_new, r)) {
        parent = c;
        cost = via;
      }
    }
    const int id = static_cast<int>(tree.size());
    tree.push_back({q_new, parent, cost});
    children.emplace_back();
    children[parent].push_back(id);

    for (int c : neighbors) {
      if (c == parent) continue;
      const double via = cost + (tree[c].p - q_new).norm();
      if (via < tree[c].cost && segment_is_free(esdf, q_new, tree[c].p, r)) {
        auto& siblings = children[tree[c].parent];
        siblings.erase(std::find(siblings.begin(), siblings.end(), c));
        tree[c].parent = id;
        tree[c].cost = via;
        children[id].push_back(c);
        propagate(c);
      }
    }
    try_goal(id);
  }

  const auto [best, best_cost] = best_goal_parent();
  if (best >= 0) {
    result.success = true;
    result.waypoints = trace(tree, best);
    push_unique(result.waypoints, request.goal);
    (void)best_cost;
  }
  finish(result, t0);
  return result;
}

const std::vector<std::string>& planner_names() {
  static const std::vector<std::string> names{"sparse_astar", "diagram_astar", "rrt_connect", "rrt_star",
                                              "esdf_astar"};
  return names;
}

}  // namespace skelplan
