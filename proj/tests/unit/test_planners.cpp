#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "skelplan/collision.hpp"
#include "skelplan/planners.hpp"
#include "skelplan/world_sim.hpp"

using namespace skelplan;

namespace {

// 4 x 4 x 2 m box with a wall at x = 2 leaving a gap at y > 2.5.
const EsdfLayer& gap_world_esdf() {
  static const EsdfLayer esdf = [] {
    PrimitiveWorld world({}, Aabb{Point(0, 0, 0), Point(4, 4, 2)});
    world.add(PlanePrimitive{PlanePrimitive::Kind::kGround, 0.0});
    world.add(PlanePrimitive{PlanePrimitive::Kind::kCeiling, 2.0});
    world.add(BoxPrimitive{Point(2.0, 1.25, 1.0), Point(0.1, 1.25, 1.0)});
    return build_esdf(world, 0.1);
  }();
  return esdf;
}

PlanRequest gap_request(std::uint64_t seed = 0) {
  PlanRequest r;
  r.start = Point(1.0, 1.0, 1.0);
  r.goal = Point(3.0, 1.0, 1.0);
  r.robot_radius = 0.3;
  r.time_limit = 30.0;
  r.rng_seed = seed;
  return r;
}

std::vector<GridIndex> voxels_of(const std::vector<Point>& waypoints, double vs) {
  std::vector<GridIndex> out;
  for (const Point& p : waypoints) out.push_back(position_to_index(p, vs));
  return out;
}

}  // namespace

TEST_CASE("path length and request validation") {
  CHECK(path_length({}) == 0.0);
  CHECK(path_length({Point(0, 0, 0), Point(3, 4, 0), Point(3, 4, 1)}) == doctest::Approx(6.0));
  PlanRequest r;
  r.robot_radius = 0.0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r = {};
  r.goal = Point(std::nan(""), 0, 0);
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("ESDF A* matches Dijkstra on random obstacle fields") {
  std::mt19937 rng(2024);
  const double vs = 0.1;
  int solved = 0, unsolved = 0;
  for (int trial = 0; trial < 25; ++trial) {
    oracle::Fixture f = oracle::random_fixture(rng, 16, 14, vs, 1.0);
    const GridIndex a{0, 0, 0}, b{15, 15, 15};
    f.free.set(a, true);
    f.free.set(b, true);
    f.esdf.at(a).distance = f.esdf.at(b).distance = 1.0f;
    PlanRequest r;
    r.start = index_to_position(a, vs);
    r.goal = index_to_position(b, vs);
    r.robot_radius = 0.5;
    const PlanResult got = astar_esdf(f.esdf, r);
    const auto expected = oracle::dijkstra(f.free, a, b);
    REQUIRE(got.success == expected.found);
    if (!got.success) {
      ++unsolved;
      continue;
    }
    ++solved;
    CHECK(oracle::step_counts(voxels_of(got.waypoints, vs)) == expected.counts);
    CHECK(got.path_length == doctest::Approx(expected.cost * vs));
  }
  CHECK(solved > 15);
  CHECK(unsolved + solved == 25);
}

TEST_CASE("endpoints in obstacles or unknown space are rejected") {
  const EsdfLayer& esdf = gap_world_esdf();
  PlanRequest r = gap_request();
  r.start = Point(2.0, 1.0, 1.0);  // inside the wall
  CHECK_THROWS_AS(astar_esdf(esdf, r), InvalidEndpointError);
  CHECK_THROWS_AS(rrt_connect(esdf, r), InvalidEndpointError);
  r = gap_request();
  r.goal = Point(50.0, 1.0, 1.0);  // unknown
  CHECK_THROWS_AS(rrt_star(esdf, r), InvalidEndpointError);
  r = gap_request();
  r.goal = Point(3.0, 1.0, 0.2);  // closer than the radius to the floor
  CHECK_THROWS_AS(astar_esdf(esdf, r), InvalidEndpointError);
}

TEST_CASE("start equal to goal is a one-point path") {
  const EsdfLayer& esdf = gap_world_esdf();
  PlanRequest r = gap_request();
  r.goal = r.start;
  for (const PlanResult& p : {astar_esdf(esdf, r), rrt_connect(esdf, r), rrt_star(esdf, r)}) {
    CHECK(p.success);
    CHECK(p.waypoints.size() == 1);
    CHECK(p.path_length == 0.0);
  }
}

TEST_CASE("grid A* detours through the gap without collisions") {
  const EsdfLayer& esdf = gap_world_esdf();
  const PlanRequest r = gap_request();
  const PlanResult p = astar_esdf(esdf, r);
  REQUIRE(p.success);
  CHECK(p.waypoints.front() == r.start);
  CHECK(p.waypoints.back() == r.goal);
  CHECK(path_is_collision_free(esdf, p.waypoints, r.robot_radius));
  // Must go around the wall end at y = 2.5 plus the radius.
  double max_y = 0.0;
  for (const Point& w : p.waypoints) max_y = std::max(max_y, w.y());
  CHECK(max_y > 2.8);
  CHECK(p.path_length > 2.0 * std::hypot(1.0, 1.8));
}

TEST_CASE("sampling planners solve the gap world deterministically") {
  const EsdfLayer& esdf = gap_world_esdf();
  RrtConfig config;
  config.max_iterations = 3000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const PlanRequest r = gap_request(seed);
    const PlanResult c1 = rrt_connect(esdf, r, config);
    const PlanResult c2 = rrt_connect(esdf, r, config);
    REQUIRE(c1.success);
    CHECK(c1.waypoints == c2.waypoints);
    CHECK(path_is_collision_free(esdf, c1.waypoints, r.robot_radius));
    CHECK(c1.waypoints.front() == r.start);
    CHECK(c1.waypoints.back() == r.goal);

    const PlanResult s1 = rrt_star(esdf, r, config);
    const PlanResult s2 = rrt_star(esdf, r, config);
    REQUIRE(s1.success);
    CHECK(s1.waypoints == s2.waypoints);
    CHECK(path_is_collision_free(esdf, s1.waypoints, r.robot_radius));
    REQUIRE(s1.first_solution_length);
    CHECK(s1.path_length <= *s1.first_solution_length + 1e-9);
  }
}

TEST_CASE("RRT* can stop at its first solution") {
  const EsdfLayer& esdf = gap_world_esdf();
  RrtConfig config;
  config.max_iterations = 20000;
  config.stop_at_first_solution = true;
  const PlanResult p = rrt_star(esdf, gap_request(4), config);
  REQUIRE(p.success);
  CHECK(p.path_length == doctest::Approx(*p.first_solution_length));
}

TEST_CASE("sampling planners give up within their budget") {
  const EsdfLayer& esdf = gap_world_esdf();
  PlanRequest r = gap_request();
  r.robot_radius = 0.3;
  RrtConfig config;
  config.max_iterations = 1;
  const PlanResult p = rrt_connect(esdf, r, config);
  CHECK_FALSE(p.success);
  CHECK(p.waypoints.empty());
}

TEST_CASE("collision helpers") {
  const EsdfLayer& esdf = gap_world_esdf();
  CHECK(esdf_distance_at(esdf, Point(1.0, 1.0, 1.0)) == doctest::Approx(0.9).epsilon(0.06));
  CHECK(std::isinf(esdf_distance_at(esdf, Point(-5, 0, 0))));
  CHECK_FALSE(segment_is_free(esdf, Point(1, 1, 1), Point(3, 1, 1), 0.3));
  CHECK(segment_is_free(esdf, Point(1, 3.4, 1), Point(3, 3.4, 1), 0.3));
  CHECK(path_is_collision_free(esdf, {Point(1, 1, 1)}, 0.3));
  CHECK(planner_names().size() == 5);
}
