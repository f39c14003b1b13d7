#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "skelplan/bench.hpp"
#include "skelplan/collision.hpp"
#include "skelplan/layer_io.hpp"

using namespace skelplan;

namespace {

// Two rooms joined by a doorway, 6 x 3 x 2 m.
PrimitiveWorld two_rooms() {
  PrimitiveWorld world({}, Aabb{Point(-0.2, -0.2, -0.2), Point(6.2, 3.2, 2.2)});
  world.add(PlanePrimitive{PlanePrimitive::Kind::kGround, 0.0});
  world.add(PlanePrimitive{PlanePrimitive::Kind::kCeiling, 2.0});
  world.add(BoxPrimitive{Point(-0.1, 1.5, 1.0), Point(0.1, 1.7, 1.0)});
  world.add(BoxPrimitive{Point(6.1, 1.5, 1.0), Point(0.1, 1.7, 1.0)});
  world.add(BoxPrimitive{Point(3.0, -0.1, 1.0), Point(3.2, 0.1, 1.0)});
  world.add(BoxPrimitive{Point(3.0, 3.1, 1.0), Point(3.2, 0.1, 1.0)});
  // Doorway 0.8 <= y <= 2.2.
  world.add(BoxPrimitive{Point(3.0, 0.4, 1.0), Point(0.1, 0.4, 1.0)});
  world.add(BoxPrimitive{Point(3.0, 2.6, 1.0), Point(0.1, 0.4, 1.0)});
  return world;
}

const PipelineOutput& built_rooms() {
  static const PipelineOutput out = [] {
    PipelineConfig config;
    config.ground_truth = true;
    return build_from_world(two_rooms(), config);
  }();
  return out;
}

}  // namespace

TEST_CASE("ground-truth pipeline on two rooms") {
  const PipelineOutput& out = built_rooms();
  CHECK(out.gvd_voxels > out.diagram_voxels);
  CHECK(out.diagram_voxels > 0);
  out.skeleton.for_each([&](const GridIndex&, const SkeletonVoxel& v) {
    if (v.on_diagram()) CHECK(v.distance >= PipelineConfig{}.medial.min_gvd_distance);
  });
  SparseGraph g = out.graph;
  CHECK(g.label_subgraphs() == 1);
  CHECK(g.vertices().size() >= 2);
  for (const auto& [id, v] : g.vertices()) CHECK(out.skeleton.find(v.voxel)->is_vertex);
  std::vector<std::string> stages;
  for (const auto& t : out.timings) stages.push_back(t.stage);
  CHECK(stages == std::vector<std::string>{"esdf", "gvd", "thinning", "vertices", "edges", "splitting", "repair"});
}

TEST_CASE("sparse graph plans through the doorway") {
  const PipelineOutput& out = built_rooms();
  PlanRequest r;
  r.start = Point(1.0, 1.5, 1.0);
  r.goal = Point(5.0, 1.5, 1.0);
  r.robot_radius = 0.3;
  const PlanResult sparse = astar_sparse(out.graph, out.esdf, r);
  REQUIRE(sparse.success);
  CHECK(path_is_collision_free(out.esdf, sparse.waypoints, r.robot_radius));
  const PlanResult diagram = astar_diagram(out.esdf, out.skeleton, r);
  REQUIRE(diagram.success);
  CHECK(path_is_collision_free(out.esdf, diagram.waypoints, r.robot_radius));
  const PlanResult grid = astar_esdf(out.esdf, r);
  REQUIRE(grid.success);
  CHECK(grid.path_length <= diagram.path_length + 1e-9);
  CHECK(sparse.path_length < 2.0 * grid.path_length);
}

TEST_CASE("stage failures name the stage") {
  PrimitiveWorld empty({}, Aabb{Point(0, 0, 0), Point(1, 1, 1)});
  PipelineConfig config;
  config.ground_truth = true;
  try {
    build_from_world(empty, config);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "esdf");
  }
  config.voxel_size = -1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("exports write parseable files") {
  const PipelineOutput& out = built_rooms();
  const std::string ply = "pipeline_test_skeleton.ply";
  export_skeleton_ply(ply, out.skeleton);
  std::ifstream in(ply);
  std::string first;
  std::getline(in, first);
  CHECK(first == "ply");
  in.close();
  std::remove(ply.c_str());

  const std::string csv = "pipeline_test_timings.csv";
  write_timings_csv(csv, out.timings);
  std::ifstream t(csv);
  std::string header;
  std::getline(t, header);
  CHECK(header == "stage,seconds");
  t.close();
  std::remove(csv.c_str());

  const std::string layer = "pipeline_test_skeleton.skpl";
  save_layer(layer, out.skeleton);
  const SkeletonLayer back = load_skeleton_layer(layer);
  std::remove(layer.c_str());
  CHECK(count_diagram_voxels(back) == out.diagram_voxels);
}

TEST_CASE("stability summary") {
  std::vector<StabilityRow> rows;
  auto row = [](double vs, double sigma, std::size_t diagram, std::size_t v, std::size_t e) {
    StabilityRow r;
    r.voxel_size = vs;
    r.sigma = sigma;
    r.diagram_voxels = diagram;
    r.vertices = v;
    r.edges = e;
    r.build_s = 1.0;
    return r;
  };
  rows.push_back(row(0.1, 0.0, 900, 50, 60));
  rows.push_back(row(0.25, 0.0, 200, 40, 45));
  rows.push_back(row(0.1, 0.1, 1000, 100, 120));
  rows.push_back(row(0.25, 0.1, 250, 50, 60));
  const StabilitySummary s = summarize_stability(rows);
  CHECK(s.diagram_ratio.at(0.0) == doctest::Approx(4.5));
  CHECK(s.diagram_ratio.at(0.1) == doctest::Approx(4.0));
  CHECK(s.graph_ratio == doctest::Approx(220.0 / 85.0));
  CHECK(s.total_s == doctest::Approx(4.0));
  std::ostringstream csv;
  write_stability_csv(csv, rows);
  CHECK(csv.str().rfind("config,voxel_size,sigma", 0) == 0);
}

TEST_CASE("maze queries are far apart cell centers") {
  const MazeSpec spec{9.0, 1.5, 1.4, 0.2, 3};
  const auto queries = maze_queries(spec, 10, 7);
  CHECK(queries.size() == 10);
  const auto centers = maze_cell_centers(spec);
  for (const Query& q : queries) {
    CHECK((q.start - q.goal).norm() >= 0.5 * spec.side);
    CHECK(std::find(centers.begin(), centers.end(), q.start) != centers.end());
  }
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median({}) == 0.0);
}

TEST_CASE("small maze benchmark passes its audit") {
  MazeBenchOptions options;
  options.maze = {6.0, 1.5, 1.4, 0.2, 2};
  options.query_pairs = 2;
  options.seeds = 2;
  options.rrt_connect_time_limit = 2.0;
  options.rrt_star_time_limit = 0.2;
  const MazeBenchResult r = run_maze_bench(options);
  CHECK(r.audit_failures == 0);
  CHECK(r.records.size() == 2 * (3 + 3 * 2));
  std::size_t grid_successes = 0;
  for (const auto& rec : r.records)
    if (rec.planner != "rrt_connect" && rec.planner != "rrt_star" && rec.planner != "rrt_star_first")
      grid_successes += rec.success;
  CHECK(grid_successes == 6);
  std::ostringstream csv;
  write_bench_csv(csv, r.records);
  CHECK(csv.str().rfind("planner,time_s,path_length_m,solution_vertices,success,seed,map_id", 0) == 0);
}
