#include "skelplan/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <random>
#include <sstream>

#include "skelplan/collision.hpp"

namespace skelplan {

namespace {

using Clock = std::chrono::steady_clock;

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ---------------------------------------------------------------------------
// Stability

std::vector<StabilityRow> run_stability(const PrimitiveWorld& world, const StabilityOptions& options,
                                        const PipelineConfig& base) {
  struct Job {
    std::string name;
    double voxel_size;
    double sigma;
    bool ground_truth;
  };
  std::vector<Job> jobs;
  if (options.include_ground_truth)
    jobs.push_back({"ground_truth", options.ground_truth_voxel_size, 0.0, true});
  for (double sigma : options.sigmas)
    for (double vs : options.voxel_sizes)
      jobs.push_back({"vs" + fixed(vs, 2) + "_sigma" + fixed(sigma, 1), vs, sigma, false});

  std::vector<StabilityRow> rows;
  for (const Job& job : jobs) {
    PipelineConfig config = base;
    config.voxel_size = job.voxel_size;
    config.camera.noise_sigma = job.sigma;
    config.ground_truth = job.ground_truth;
    const auto t0 = Clock::now();
    const PipelineOutput out = build_from_world(world, config);
    StabilityRow row;
    row.name = job.name;
    row.voxel_size = job.voxel_size;
    row.sigma = job.sigma;
    row.ground_truth = job.ground_truth;
    row.gvd_voxels = out.gvd_voxels;
    row.diagram_voxels = out.diagram_voxels;
    row.vertices = out.graph.vertices().size();
    row.edges = out.graph.edges().size();
    row.build_s = std::chrono::duration<double>(Clock::now() - t0).count();
    rows.push_back(row);
  }
  return rows;
}

StabilitySummary summarize_stability(const std::vector<StabilityRow>& rows) {
  StabilitySummary summary;
  std::map<double, std::pair<const StabilityRow*, const StabilityRow*>> extremes;  // finest, coarsest
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  for (const auto& row : rows) {
    summary.total_s += row.build_s;
    lo = std::min(lo, row.graph_size());
    hi = std::max(hi, row.graph_size());
    if (row.ground_truth) continue;
    auto& [finest, coarsest] = extremes[row.sigma];
    if (finest == nullptr || row.voxel_size < finest->voxel_size) finest = &row;
    if (coarsest == nullptr || row.voxel_size > coarsest->voxel_size) coarsest = &row;
  }
  for (const auto& [sigma, pair] : extremes)
    summary.diagram_ratio[sigma] = pair.second->diagram_voxels == 0
                                       ? 0.0
                                       : double(pair.first->diagram_voxels) / double(pair.second->diagram_voxels);
  summary.graph_ratio = lo == 0 ? 0.0 : double(hi) / double(lo);
  return summary;
}

void write_stability_csv(std::ostream& out, const std::vector<StabilityRow>& rows) {
  out << "config,voxel_size,sigma,ground_truth,gvd_voxels,diagram_voxels,vertices,edges,graph_size,build_s\n";
  for (const auto& r : rows)
    out << r.name << ',' << r.voxel_size << ',' << r.sigma << ',' << (r.ground_truth ? 1 : 0) << ','
        << r.gvd_voxels << ',' << r.diagram_voxels << ',' << r.vertices << ',' << r.edges << ',' << r.graph_size()
        << ',' << r.build_s << '\n';
}

// ---------------------------------------------------------------------------
// Maze

std::vector<Query> maze_queries(const MazeSpec& spec, std::size_t count, std::uint64_t seed) {
  const std::vector<Point> centers = maze_cell_centers(spec);
  if (centers.size() < 2) throw std::invalid_argument("maze has fewer than two cells");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
  std::vector<Query> out;
  while (out.size() < count) {
    const Point& a = centers[pick(rng)];
    const Point& b = centers[pick(rng)];
    if ((a - b).norm() >= 0.5 * spec.side) out.push_back({a, b});
  }
  return out;
}

MazeBenchResult run_maze_bench(const MazeBenchOptions& options) {
  const PrimitiveWorld world = generate_maze(options.maze);
  PipelineConfig config;
  config.voxel_size = options.voxel_size;
  config.ground_truth = !options.scanned_map;
  config.graph.robot_radius = options.robot_radius;
  config.seed = options.maze.seed;
  const std::vector<Pose> poses = options.scanned_map ? maze_coverage_poses(options.maze) : std::vector<Pose>{};
  const PipelineOutput built = build_from_world(world, config, poses);
  const SparseGraphPlanner sparse(built.graph, built.esdf);

  MazeBenchResult result;
  result.graph_vertices = built.graph.vertices().size();
  result.graph_edges = built.graph.edges().size();
  result.build_timings = built.timings;

  const std::string map = "maze" + fixed(options.maze.side, 0) + "-" + std::to_string(options.maze.seed);
  const std::vector<Query> queries = maze_queries(options.maze, options.query_pairs, options.query_seed);
  auto record = [&](const std::string& name, const PlanResult& r, std::uint64_t seed, const std::string& id) {
    if (r.success && !path_is_collision_free(built.esdf, r.waypoints, options.robot_radius)) ++result.audit_failures;
    result.records.push_back({name, r.solve_time, r.path_length, r.solution_vertices, r.success, seed, id});
  };

  for (std::size_t q = 0; q < queries.size(); ++q) {
    const std::string id = map + "/q" + std::to_string(q);
    PlanRequest request;
    request.start = queries[q].start;
    request.goal = queries[q].goal;
    request.robot_radius = options.robot_radius;
    record("sparse_astar", sparse.plan(request), 0, id);
    record("diagram_astar", astar_diagram(built.esdf, built.skeleton, request), 0, id);
    record("esdf_astar", astar_esdf(built.esdf, request), 0, id);
    for (std::size_t s = 1; s <= options.seeds; ++s) {
      request.rng_seed = s;
      request.time_limit = options.rrt_connect_time_limit;
      record("rrt_connect", rrt_connect(built.esdf, request, options.rrt), s, id);
      request.time_limit = options.rrt_star_time_limit;
      const PlanResult star = rrt_star(built.esdf, request, options.rrt);
      record("rrt_star", star, s, id);
      BenchRecord first{"rrt_star_first", star.first_solution_time.value_or(star.solve_time),
                        star.first_solution_length.value_or(0.0), star.first_solution_vertices.value_or(0),
                        star.first_solution_time.has_value(), s, id};
      result.records.push_back(first);
    }
  }

  std::map<std::string, std::vector<double>> times;
  std::map<std::string, std::vector<double>> lengths;
  for (const auto& r : result.records) {
    times[r.planner].push_back(r.time_s);
    if (r.success) lengths[r.planner].push_back(r.path_length_m);
  }
  for (const auto& [name, t] : times) result.median_time[name] = median(t);
  for (const auto& [name, l] : lengths) result.median_length[name] = median(l);
  return result;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "planner,time_s,path_length_m,solution_vertices,success,seed,map_id\n";
  out << std::setprecision(9);
  for (const auto& r : records)
    out << r.planner << ',' << r.time_s << ',' << r.path_length_m << ',' << r.solution_vertices << ','
        << (r.success ? 1 : 0) << ',' << r.seed << ',' << r.map_id << '\n';
}

}  // namespace skelplan
