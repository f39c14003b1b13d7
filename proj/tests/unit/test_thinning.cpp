#include "doctest.h"

#include <Eigen/LU>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "skelplan/thinning.hpp"

using namespace skelplan;

namespace {

Neighborhood mask_of(std::initializer_list<GridIndex> cells) {
  Neighborhood n = kCenterMask;
  for (const GridIndex& c : cells) n |= 1u << cell_bit(c.x, c.y, c.z);
  return n;
}

oracle::Grid to_grid(const SkeletonLayer& s, const GridIndex& lo, int n) {
  oracle::Grid g(lo, n, n, n);
  s.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
    if (v.on_diagram() && g.inside(i)) g.set(i, true);
  });
  return g;
}

// Union of random boxes inside [1, n-2]^3 so the box border stays empty.
SkeletonLayer random_blob(std::mt19937& rng, int n, int boxes) {
  SkeletonLayer s(0.1);
  std::uniform_int_distribution<int> pos(1, n - 2);
  std::uniform_int_distribution<int> len(1, 6);
  for (int b = 0; b < boxes; ++b) {
    const GridIndex a{pos(rng), pos(rng), pos(rng)};
    const GridIndex e{std::min(n - 2, a.x + len(rng)), std::min(n - 2, a.y + len(rng)), std::min(n - 2, a.z + len(rng))};
    for (int z = a.z; z <= e.z; ++z)
      for (int y = a.y; y <= e.y; ++y)
        for (int x = a.x; x <= e.x; ++x) s.at({x, y, z}).is_edge = true;
  }
  return s;
}

}  // namespace

TEST_CASE("simple point examples") {
  CHECK_FALSE(is_simple(mask_of({{-1, 0, 0}, {1, 0, 0}})));
  CHECK(is_simple(mask_of({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}})));
  CHECK_FALSE(is_simple(kCenterMask));
  // Removing the center of a filled square opens a tunnel.
  const Neighborhood square =
      mask_of({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {1, 1, 0}, {1, -1, 0}, {-1, 1, 0}, {-1, -1, 0}});
  CHECK_FALSE(is_simple(square));
  CHECK_FALSE(oracle::simple_point(square));
  // Interior of a solid block.
  CHECK_FALSE(is_simple(kFullMask));
}

TEST_CASE("is_simple agrees with the 5x5x5 oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> density(0.05, 0.95);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int simple = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const double p = density(rng);
    Neighborhood n = kCenterMask;
    for (int bit = 0; bit < 27; ++bit)
      if (bit != kCenterBit && u(rng) < p) n |= 1u << bit;
    const bool expected = oracle::simple_point(n);
    CHECK(is_simple(n) == expected);
    simple += expected;
  }
  CHECK(simple > 1000);
}

TEST_CASE("cube symmetries form the 48-element group") {
  const auto& g = cube_symmetries();
  CHECK(g.size() == 48);
  std::set<std::vector<int>> distinct;
  for (const auto& m : g) {
    const Eigen::Matrix3d d = m.cast<double>();
    CHECK(std::abs(d.determinant()) == doctest::Approx(1.0));
    distinct.insert(std::vector<int>(m.data(), m.data() + 9));
  }
  CHECK(distinct.size() == 48);
}

TEST_CASE("symmetry expansion orbit sizes") {
  CHECK(expand_symmetries(VoxelTemplate{}).size() == 1);
  CHECK(expand_symmetries(VoxelTemplate{mask_of({{1, 0, 0}}), 0}).size() == 6);
  CHECK(expand_symmetries(VoxelTemplate{mask_of({{1, 1, 0}}), 0}).size() == 12);
  CHECK(expand_symmetries(VoxelTemplate{mask_of({{1, 1, 1}}), 0}).size() == 8);
  for (const auto& t : default_thinning_templates().deletion.templates()) CHECK_NOTHROW(t.validate());
}

TEST_CASE("template images match the transformed neighborhoods") {
  std::mt19937_64 rng(4);
  for (const VoxelTemplate& base : default_thinning_templates().deletion_base) {
    for (int trial = 0; trial < (1 << 14); ++trial) {
      const Neighborhood n = (static_cast<Neighborhood>(rng()) & kFullMask) | kCenterMask;
      const auto& m = cube_symmetries()[trial % 48];
      CHECK(base.matches(n) == transform_template(base, m).matches(transform_neighborhood(n, m)));
    }
  }
}

TEST_CASE("template validation rejects overlaps and a background center") {
  CHECK_THROWS_AS((VoxelTemplate{kCenterMask | 1u, 1u}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((VoxelTemplate{kCenterMask, kCenterMask}.validate()), std::invalid_argument);
}

TEST_CASE("shipped template file equals the built-in templates") {
  const ThinningTemplates file = load_thinning_templates(SKELPLAN_DATA_DIR "/thinning_templates.json");
  const ThinningTemplates& builtin = default_thinning_templates();
  CHECK(file.deletion_base == builtin.deletion_base);
  CHECK(file.corner_base == builtin.corner_base);
  CHECK(file.deletion.templates() == builtin.deletion.templates());
  const ThinningTemplates back = thinning_templates_from_json(thinning_templates_to_json(builtin));
  CHECK(back.corner.templates() == builtin.corner.templates());
  CHECK_THROWS(load_thinning_templates("/nonexistent/templates.json"));
}

TEST_CASE("end point rules") {
  const TemplateSet& corner = default_thinning_templates().corner;
  CHECK(is_end_point(mask_of({{1, 1, 1}}), corner));
  CHECK_FALSE(is_end_point(mask_of({{1, 0, 0}, {-1, 0, 0}}), corner));
  // Tip of a staircase: one face neighbor and its diagonal continuation.
  const Neighborhood tip = mask_of({{1, 0, 0}, {1, 1, 0}});
  CHECK(is_end_point(tip, corner));
  CHECK_FALSE(is_end_point(tip));
}

TEST_CASE("thinning leaves a thin line unchanged") {
  SkeletonLayer s(0.1);
  for (int x = 0; x < 10; ++x) s.at({x, 0, 0}).is_edge = true;
  const ThinningStats stats = thin(s);
  CHECK(stats.deleted == 0);
  CHECK(stats.remaining == 10);
  CHECK(stats.passes == 1);
}

TEST_CASE("thinning a slab keeps one connected curve with its extremes") {
  SkeletonLayer s(0.1);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) s.at({x, y, 0}).is_edge = true;
  const ThinningStats stats = thin(s);
  CHECK(stats.remaining < 25);
  CHECK(stats.remaining >= 1);
  const oracle::Grid g = to_grid(s, {-1, -1, -1}, 8);
  CHECK(oracle::components(g, true, 26) == 1);
  CHECK(oracle::components(g, false, 6) == 1);
}

TEST_CASE("thinning preserves topology and reaches a fixpoint on random shapes") {
  std::mt19937 rng(99);
  const int n = 20;
  for (int world = 0; world < 12; ++world) {
    SkeletonLayer s = random_blob(rng, n, 3 + world % 5);
    const oracle::Grid before = to_grid(s, {0, 0, 0}, n);
    thin(s);
    const oracle::Grid after = to_grid(s, {0, 0, 0}, n);
    CHECK(oracle::census(before) == oracle::census(after));
    // Only deletions.
    for (std::size_t i = 0; i < before.cells.size(); ++i) CHECK(after.cells[i] <= before.cells[i]);
    // Nothing left to delete.
    s.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
      if (v.is_edge) CHECK_FALSE(is_deletable(diagram_neighborhood(s, i), default_thinning_templates(), true));
    });
  }
}

TEST_CASE("thinning is deterministic") {
  std::mt19937 a(5), b(5);
  SkeletonLayer s1 = random_blob(a, 20, 6);
  SkeletonLayer s2 = random_blob(b, 20, 6);
  thin(s1);
  thin(s2);
  std::vector<GridIndex> l1, l2;
  s1.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
    if (v.is_edge) l1.push_back(i);
  });
  s2.for_each([&](const GridIndex& i, const SkeletonVoxel& v) {
    if (v.is_edge) l2.push_back(i);
  });
  CHECK(l1 == l2);
}

TEST_CASE("vertex voxels are never thinned") {
  SkeletonLayer s(0.1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) s.at({x, y, 0}).is_edge = true;
  s.at({0, 0, 0}).is_vertex = true;
  thin(s);
  CHECK(s.find({0, 0, 0})->is_edge);
}

TEST_CASE("corner template keeps staircase tips") {
  std::vector<GridIndex> stair;
  GridIndex c{0, 0, 0};
  for (int i = 0; i < 8; ++i) {
    stair.push_back(c);
    c.x++;
    stair.push_back(c);
    c.y++;
  }
  for (bool corner : {true, false}) {
    SkeletonLayer s(0.1);
    for (const GridIndex& g : stair) s.at(g).is_edge = true;
    ThinningOptions options;
    options.use_corner_template = corner;
    thin(s, default_thinning_templates(), options);
    CHECK(s.find(stair.front())->is_edge == corner);
    CHECK(s.find(stair.back())->is_edge);
  }
}
