#include "doctest.h"

#include <algorithm>
#include <random>

#include "skelplan/medial_axis.hpp"
#include "skelplan/world_sim.hpp"

using namespace skelplan;

namespace {

// Walls at x = 0 and x = 2 * half (voxel indices), open in y and z.
EsdfLayer corridor_esdf(int half, int extent) {
  const double vs = 0.1;
  TsdfLayer tsdf(vs);
  for (int z = 0; z < extent; ++z)
    for (int y = 0; y < extent; ++y)
      for (int x = 0; x <= 2 * half; ++x) {
        const double d = std::min(x, 2 * half - x) * vs;
        tsdf.at({x, y, z}) = {static_cast<float>(std::min(d, 0.4)), 1.0f};
      }
  return build_esdf(tsdf);
}

}  // namespace

TEST_CASE("is_medial separates opposite walls from a single wall") {
  const double theta = std::acos(0.825);
  // Voxel sees the -x wall; its +x neighbor sees the +x wall.
  CHECK(is_medial({-5, 0, 0}, {4, 0, 0}, {-1, 0, 0}, theta));
  // Both see the -x wall.
  CHECK_FALSE(is_medial({-5, 0, 0}, {-6, 0, 0}, {-1, 0, 0}, theta));
  // Neighbor's surface voxel is this voxel.
  CHECK(is_medial({-5, 0, 0}, {0, 0, 1}, {0, 0, 1}, theta));
  CHECK_THROWS_AS(is_medial({0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, theta), std::invalid_argument);
}

TEST_CASE("is_medial threshold sits at the configured angle") {
  const double theta = std::acos(0.825);
  // Offsets to the neighbor's surface at about 31 and 39 degrees from the voxel parent.
  CHECK_FALSE(is_medial({10, 0, 0}, {10, 6, -1}, {0, 0, -1}, theta));
  CHECK(is_medial({10, 0, 0}, {10, 8, -1}, {0, 0, -1}, theta));
  // A wider angle accepts both.
  CHECK(is_medial({10, 0, 0}, {10, 6, -1}, {0, 0, -1}, std::acos(0.9)));
}

TEST_CASE("GVD of a corridor lies on its center plane") {
  const int half = 10;
  const int extent = 12;
  const EsdfLayer esdf = corridor_esdf(half, extent);
  MedialAxisConfig config;
  const SkeletonLayer gvd = extract_gvd(esdf, config);
  std::size_t medial = 0;
  gvd.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
    if (!v.on_medial_axis) return;
    ++medial;
    CHECK(std::abs(i.x - half) <= 1);
    CHECK(v.distance >= config.min_gvd_distance);
  });
  for (int z = 0; z < extent; ++z)
    for (int y = 0; y < extent; ++y) {
      bool hit = false;
      for (int x = half - 1; x <= half + 1; ++x) {
        const SkeletonVoxel* v = gvd.find({x, y, z});
        hit = hit || (v != nullptr && v->on_medial_axis);
      }
      CHECK(hit);
    }
  CHECK(medial >= static_cast<std::size_t>(extent * extent));

  // Raising the clearance floor above the half width empties the diagram.
  config.min_gvd_distance = 1.1;
  std::size_t left = 0;
  extract_gvd(esdf, config).for_each([&](const GridIndex&, const SkeletonVoxel& v) { left += v.on_medial_axis; });
  CHECK(left == 0);
}

TEST_CASE("medial axis config validation") {
  MedialAxisConfig c;
  CHECK_NOTHROW(c.validate());
  c.theta = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.min_edge_neighbors = 27;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("edge classification counts medial neighbors") {
  SkeletonLayer s(0.1);
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) s.at({x, y, z}).on_medial_axis = true;
  classify_edges(s, 18);
  CHECK(s.find({1, 1, 1})->is_edge);       // 26 neighbors
  CHECK_FALSE(s.find({0, 0, 0})->is_edge);  // 7 neighbors
  CHECK(s.find({1, 1, 0})->is_edge == false);  // 17 neighbors
  classify_edges(s, 17);
  CHECK(s.find({1, 1, 0})->is_edge);
}

TEST_CASE("edge sets shrink as the neighbor threshold grows") {
  std::mt19937 rng(21);
  std::bernoulli_distribution on(0.6);
  SkeletonLayer s(0.1);
  for (int z = 0; z < 10; ++z)
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) s.at({x, y, z}).on_medial_axis = on(rng);
  std::vector<GridIndex> previous;
  s.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
    if (v.on_medial_axis) previous.push_back(i);
  });
  std::sort(previous.begin(), previous.end());
  for (int k = 1; k <= 26; ++k) {
    classify_edges(s, k);
    std::vector<GridIndex> current;
    s.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
      if (v.is_edge) current.push_back(i);
    });
    std::sort(current.begin(), current.end());
    CHECK(std::includes(previous.begin(), previous.end(), current.begin(), current.end()));
    previous = current;
  }
}

TEST_CASE("enclosed pockets in the edge set are filled above the clearance floor") {
  SkeletonLayer s(0.1);
  EsdfLayer esdf(0.1);
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) {
        const bool shell = x == 0 || y == 0 || z == 0 || x == 4 || y == 4 || z == 4;
        EsdfVoxel& e = esdf.at({x, y, z});
        e.observed = true;
        e.distance = 1.0f;
        if (shell) s.at({x, y, z}).is_edge = true;
      }
  SkeletonLayer copy(0.1);
  s.for_each([&](const GridIndex& i, const SkeletonVoxel& v) { copy.at(i) = v; });
  CHECK(fill_edge_cavities(copy, esdf, 2.0) == 0);
  CHECK(fill_edge_cavities(s, esdf, 0.5) == 27);
  CHECK(s.find({2, 2, 2})->is_edge);

  // An opening in the shell connects the pocket to the outside.
  SkeletonLayer open(0.1);
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) {
        const bool shell = x == 0 || y == 0 || z == 0 || x == 4 || y == 4 || z == 4;
        if (shell && !(x == 4 && y == 2 && z == 2)) open.at({x, y, z}).is_edge = true;
      }
  CHECK(fill_edge_cavities(open, esdf, 0.5) == 0);
}

TEST_CASE("basis point count on a corridor") {
  const EsdfLayer esdf = corridor_esdf(10, 12);
  CHECK(count_basis_points(esdf, {10, 6, 6}) >= 2);
  CHECK(count_basis_points(esdf, {3, 6, 6}, 4.0) == 1);
}
