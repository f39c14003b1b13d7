#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "skelplan/bench.hpp"
#include "skelplan/layer_io.hpp"
#include "skelplan/pipeline.hpp"
#include "skelplan/planners.hpp"
#include "skelplan/world_sim.hpp"

namespace fs = std::filesystem;
using namespace skelplan;

namespace {

struct WorldArgs {
  std::string type = "maze";
  MazeSpec maze;
  std::string out = "world.json";
};

struct BuildArgs {
  std::string world;
  std::string esdf;
  std::string out = "artifacts";
  PipelineConfig pipeline;
  double max_edge_deviation = 0.0;
};

struct PlanArgs {
  std::string dir = "artifacts";
  std::vector<double> start;
  std::vector<double> goal;
  std::string planner = "sparse_astar";
  PlanRequest request;
  std::string out;
  std::string ply;
};

struct StabilityArgs {
  std::string world;
  std::string out = "stability.csv";
  PipelineConfig pipeline;
};

struct MazeArgs {
  MazeBenchOptions options;
  bool full_scale = false;
  std::string out = "maze_bench.csv";
};

struct ExportArgs {
  std::string dir = "artifacts";
};

Point to_point(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

void add_pipeline_flags(CLI::App* cmd, PipelineConfig& p) {
  cmd->add_option("--voxel-size", p.voxel_size, "Voxel edge length [m]");
  cmd->add_option("--sigma", p.camera.noise_sigma, "Depth noise standard deviation [m]");
  cmd->add_option("--poses", p.num_poses, "Number of simulated views");
  cmd->add_option("--max-range", p.camera.max_range, "Sensor range [m]");
  cmd->add_option("--seed", p.seed, "Pose and noise seed");
  cmd->add_flag("--ground-truth", p.ground_truth, "Use exact distances instead of scans");
  cmd->add_option("--min-gvd-distance", p.medial.min_gvd_distance, "Minimum diagram clearance [m]");
  cmd->add_option("--theta", p.medial.theta, "Medial separation angle [rad]");
  cmd->add_option("--r-prune", p.graph.r_prune, "Vertex pruning radius [m]");
  cmd->add_option("--robot-radius", p.graph.robot_radius, "Edge clearance flag radius [m]");
  cmd->add_option("--templates", p.templates_path, "Thinning template JSON")->check(CLI::ExistingFile);
  cmd->add_flag("--no-corner-template", [&p](std::int64_t) { p.thinning.use_corner_template = false; },
                "Disable the corner template");
}

void cmd_world(const WorldArgs& a) {
  PrimitiveWorld world;
  if (a.type == "maze") {
    world = generate_maze(a.maze);
  } else if (a.type == "sim") {
    world = make_sim_world();
  } else {
    throw CLI::ValidationError("--type", "expected maze or sim");
  }
  save_world(a.out, world);
  std::cout << "wrote " << a.out << " (" << world.primitives().size() << " primitives)\n";
}

void cmd_build(BuildArgs a) {
  if (a.world.empty() == a.esdf.empty()) throw CLI::ValidationError("build", "give exactly one of --world, --esdf");
  if (a.max_edge_deviation > 0.0) a.pipeline.graph.max_edge_deviation = a.max_edge_deviation;
  fs::create_directories(a.out);
  PipelineOutput out = a.world.empty() ? build_from_esdf(load_esdf_layer(a.esdf), a.pipeline)
                                       : build_from_world(load_world(a.world), a.pipeline);
  const fs::path dir(a.out);
  save_layer((dir / "esdf.skpl").string(), out.esdf);
  save_layer((dir / "skeleton.skpl").string(), out.skeleton);
  save_graph((dir / "graph.json").string(), out.graph);
  write_timings_csv((dir / "timings.csv").string(), out.timings);
  std::cout << "gvd voxels " << out.gvd_voxels << ", diagram voxels " << out.diagram_voxels << ", vertices "
            << out.graph.vertices().size() << ", edges " << out.graph.edges().size() << "\n";
  for (const auto& t : out.timings) std::cout << "  " << t.stage << ": " << t.seconds << " s\n";
}

void cmd_plan(PlanArgs a) {
  const auto& names = planner_names();
  if (std::find(names.begin(), names.end(), a.planner) == names.end())
    throw CLI::ValidationError("--planner", "unknown planner " + a.planner);
  const fs::path dir(a.dir);
  const EsdfLayer esdf = load_esdf_layer((dir / "esdf.skpl").string());
  a.request.start = to_point(a.start);
  a.request.goal = to_point(a.goal);

  PlanResult result;
  if (a.planner == "esdf_astar") {
    result = astar_esdf(esdf, a.request);
  } else if (a.planner == "diagram_astar") {
    result = astar_diagram(esdf, load_skeleton_layer((dir / "skeleton.skpl").string()), a.request);
  } else if (a.planner == "sparse_astar") {
    result = astar_sparse(load_graph((dir / "graph.json").string()), esdf, a.request);
  } else if (a.planner == "rrt_connect") {
    result = rrt_connect(esdf, a.request);
  } else {
    result = rrt_star(esdf, a.request);
  }
  const std::string json = plan_result_to_json(result).dump(2);
  if (a.out.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream(a.out) << json << "\n";
  }
  if (!a.ply.empty() && result.success) export_path_ply(a.ply, result.waypoints);
}

void cmd_bench_stability(const StabilityArgs& a) {
  const PrimitiveWorld world = a.world.empty() ? make_sim_world() : load_world(a.world);
  const auto rows = run_stability(world, StabilityOptions{}, a.pipeline);
  std::ofstream out(a.out);
  write_stability_csv(out, rows);
  write_stability_csv(std::cout, rows);
  const StabilitySummary s = summarize_stability(rows);
  for (const auto& [sigma, ratio] : s.diagram_ratio)
    std::cout << "sigma " << sigma << ": diagram finest/coarsest = " << ratio << "\n";
  std::cout << "graph size max/min = " << s.graph_ratio << ", total " << s.total_s << " s\n";
}

void cmd_bench_maze(MazeArgs a) {
  if (a.full_scale) a.options.maze.side = 30.0;
  const MazeBenchResult r = run_maze_bench(a.options);
  std::ofstream out(a.out);
  write_bench_csv(out, r.records);
  std::cout << "graph: " << r.graph_vertices << " vertices, " << r.graph_edges << " edges\n";
  for (const auto& [name, t] : r.median_time)
    std::cout << name << ": median time " << t << " s, median length "
              << (r.median_length.count(name) ? r.median_length.at(name) : 0.0) << " m\n";
  std::cout << "audit failures: " << r.audit_failures << "\n";
}

void cmd_export(const ExportArgs& a) {
  const fs::path dir(a.dir);
  export_skeleton_ply((dir / "skeleton.ply").string(), load_skeleton_layer((dir / "skeleton.skpl").string()));
  export_graph_ply((dir / "graph.ply").string(), load_graph((dir / "graph.json").string()));
  std::cout << "wrote " << (dir / "skeleton.ply").string() << " and " << (dir / "graph.ply").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton and sparse-graph planning toolkit"};
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags take precedence");
  app.require_subcommand(1);

  WorldArgs world;
  auto* w = app.add_subcommand("world", "Generate a maze or the fixture world");
  w->add_option("--type", world.type, "maze or sim")->check(CLI::IsMember({"maze", "sim"}));
  w->add_option("--side", world.maze.side, "Maze side length [m]");
  w->add_option("--cell", world.maze.cell, "Maze cell size [m]");
  w->add_option("--wall-height", world.maze.wall_height, "Maze wall height [m]");
  w->add_option("--wall-thickness", world.maze.wall_thickness, "Maze wall thickness [m]");
  w->add_option("--seed", world.maze.seed, "Maze seed");
  w->add_option("-o,--out", world.out, "Output world JSON");

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Map a world and build skeleton and sparse graph");
  b->add_option("--world", build.world, "World JSON")->check(CLI::ExistingFile);
  b->add_option("--esdf", build.esdf, "ESDF layer file")->check(CLI::ExistingFile);
  b->add_option("-o,--out", build.out, "Artifact directory");
  b->add_option("--max-edge-deviation", build.max_edge_deviation, "Edge split threshold [m]");
  add_pipeline_flags(b, build.pipeline);

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Plan on built artifacts");
  p->add_option("--dir", plan.dir, "Artifact directory")->check(CLI::ExistingDirectory);
  p->add_option("--start", plan.start, "x y z")->expected(3)->required();
  p->add_option("--goal", plan.goal, "x y z")->expected(3)->required();
  p->add_option("--planner", plan.planner, "sparse_astar, diagram_astar, rrt_connect, rrt_star, esdf_astar");
  p->add_option("--robot-radius", plan.request.robot_radius, "Robot sphere radius [m]");
  p->add_option("--time-limit", plan.request.time_limit, "Sampling planner limit [s]");
  p->add_option("--seed", plan.request.rng_seed, "Sampling seed");
  p->add_option("-o,--out", plan.out, "Result JSON (default stdout)");
  p->add_option("--ply", plan.ply, "Path PLY output");

  StabilityArgs stability;
  auto* s = app.add_subcommand("bench-stability", "Graph size across voxel sizes and noise levels");
  s->add_option("--world", stability.world, "World JSON (default fixture world)")->check(CLI::ExistingFile);
  s->add_option("-o,--out", stability.out, "CSV output");
  add_pipeline_flags(s, stability.pipeline);

  MazeArgs maze;
  auto* m = app.add_subcommand("bench-maze", "Planner comparison on a maze");
  m->add_option("--side", maze.options.maze.side, "Maze side length [m]");
  m->add_flag("--full-scale", maze.full_scale, "Use a 30 m maze");
  m->add_option("--maze-seed", maze.options.maze.seed, "Maze seed");
  m->add_option("--voxel-size", maze.options.voxel_size, "Voxel size [m]");
  m->add_flag("--scanned", maze.options.scanned_map, "Map the maze from simulated scans");
  m->add_option("--pairs", maze.options.query_pairs, "Query pairs");
  m->add_option("--seeds", maze.options.seeds, "Seeds per sampling planner");
  m->add_option("--robot-radius", maze.options.robot_radius, "Robot sphere radius [m]");
  m->add_option("--rrt-time-limit", maze.options.rrt_connect_time_limit, "RRT Connect limit [s]");
  m->add_option("--rrt-star-time-limit", maze.options.rrt_star_time_limit, "RRT* limit [s]");
  m->add_option("-o,--out", maze.out, "CSV output");

  ExportArgs exp;
  auto* e = app.add_subcommand("export", "Write PLY files for built artifacts");
  e->add_option("--dir", exp.dir, "Artifact directory")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);
  try {
    if (w->parsed()) cmd_world(world);
    if (b->parsed()) cmd_build(build);
    if (p->parsed()) cmd_plan(plan);
    if (s->parsed()) cmd_bench_stability(stability);
    if (m->parsed()) cmd_bench_maze(maze);
    if (e->parsed()) cmd_export(exp);
  } catch (const CLI::Error& err) {
    return app.exit(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
