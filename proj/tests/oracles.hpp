#pragma once

// Brute-force references shared by the unit and acceptance tests.

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "skelplan/voxel_core.hpp"

namespace oracle {

using skelplan::GridIndex;
using skelplan::Neighborhood;

/// Dense boolean box [lo, lo + dims).
struct Grid {
  GridIndex lo{};
  int nx = 0, ny = 0, nz = 0;
  std::vector<char> cells;

  Grid(const GridIndex& lo_, int nx_, int ny_, int nz_)
      : lo(lo_), nx(nx_), ny(ny_), nz(nz_), cells(static_cast<std::size_t>(nx_) * ny_ * nz_, 0) {}
  bool inside(const GridIndex& g) const {
    return g.x >= lo.x && g.y >= lo.y && g.z >= lo.z && g.x < lo.x + nx && g.y < lo.y + ny && g.z < lo.z + nz;
  }
  std::size_t flat(const GridIndex& g) const {
    return static_cast<std::size_t>(g.x - lo.x) + static_cast<std::size_t>(nx) *
                                                      (static_cast<std::size_t>(g.y - lo.y) +
                                                       static_cast<std::size_t>(ny) * static_cast<std::size_t>(g.z - lo.z));
  }
  bool get(const GridIndex& g) const { return inside(g) && cells[flat(g)] != 0; }
  void set(const GridIndex& g, bool v) { cells[flat(g)] = v ? 1 : 0; }
};

inline std::vector<GridIndex> steps(int connectivity) {
  std::vector<GridIndex> out;
  for (int z = -1; z <= 1; ++z)
    for (int y = -1; y <= 1; ++y)
      for (int x = -1; x <= 1; ++x) {
        const int l1 = std::abs(x) + std::abs(y) + std::abs(z);
        if (l1 == 0) continue;
        if (connectivity == 6 && l1 > 1) continue;
        if (connectivity == 18 && l1 > 2) continue;
        out.push_back({x, y, z});
      }
  return out;
}

/// Components of cells equal to `value` inside the box.
inline int components(const Grid& grid, bool value, int connectivity) {
  const auto nb = steps(connectivity);
  std::vector<char> seen(grid.cells.size(), 0);
  int count = 0;
  for (int z = 0; z < grid.nz; ++z)
    for (int y = 0; y < grid.ny; ++y)
      for (int x = 0; x < grid.nx; ++x) {
        const GridIndex start = grid.lo + GridIndex{x, y, z};
        const std::size_t f = grid.flat(start);
        if ((grid.cells[f] != 0) != value || seen[f]) continue;
        ++count;
        seen[f] = 1;
        std::vector<GridIndex> stack{start};
        while (!stack.empty()) {
          const GridIndex c = stack.back();
          stack.pop_back();
          for (const GridIndex& o : nb) {
            const GridIndex n = c + o;
            if (!grid.inside(n)) continue;
            const std::size_t fn = grid.flat(n);
            if ((grid.cells[fn] != 0) != value || seen[fn]) continue;
            seen[fn] = 1;
            stack.push_back(n);
          }
        }
      }
  return count;
}

/// Euler characteristic of the union of closed unit cubes at foreground cells.
inline int euler_characteristic(const Grid& grid) {
  const int mx = 2 * grid.nx + 1, my = 2 * grid.ny + 1, mz = 2 * grid.nz + 1;
  std::vector<char> cell(static_cast<std::size_t>(mx) * my * mz, 0);
  auto at = [&](int x, int y, int z) -> char& { return cell[x + static_cast<std::size_t>(mx) * (y + static_cast<std::size_t>(my) * z)]; };
  for (int z = 0; z < grid.nz; ++z)
    for (int y = 0; y < grid.ny; ++y)
      for (int x = 0; x < grid.nx; ++x) {
        if (!grid.cells[grid.flat(grid.lo + GridIndex{x, y, z})]) continue;
        for (int c = 0; c <= 2; ++c)
          for (int b = 0; b <= 2; ++b)
            for (int a = 0; a <= 2; ++a) at(2 * x + a, 2 * y + b, 2 * z + c) = 1;
      }
  int chi = 0;
  for (int z = 0; z < mz; ++z)
    for (int y = 0; y < my; ++y)
      for (int x = 0; x < mx; ++x)
        if (at(x, y, z)) chi += ((x & 1) + (y & 1) + (z & 1)) % 2 == 0 ? 1 : -1;
  return chi;
}

/// Topology census with 26-connected foreground and 6-connected background.
struct Census {
  int foreground = 0;
  int background = 0;
  int euler = 0;
  bool operator==(const Census&) const = default;
};

inline Census census(const Grid& grid) {
  return {components(grid, true, 26), components(grid, false, 6), euler_characteristic(grid)};
}

/// Simple-point reference: embeds the neighborhood in an empty 5x5x5 box and
/// compares component counts and Euler characteristic with and without the
/// center. Equal counts alone would miss a deletion that opens a tunnel.
inline bool simple_point(Neighborhood n) {
  Grid grid({-2, -2, -2}, 5, 5, 5);
  for (int bit = 0; bit < 27; ++bit)
    if ((n >> bit) & 1u) grid.set(skelplan::cell_offset(bit), true);
  grid.set({0, 0, 0}, true);
  const Census with = census(grid);
  grid.set({0, 0, 0}, false);
  return with == census(grid);
}

/// Step counts (face, edge, corner) of a 26-connected voxel path. The cost
/// n1 + n2 sqrt(2) + n3 sqrt(3) identifies the tuple uniquely, so optimal
/// paths agree on it exactly.
using StepCounts = std::array<int, 3>;

inline StepCounts step_counts(const std::vector<GridIndex>& path) {
  StepCounts c{0, 0, 0};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const GridIndex d = path[i] - path[i - 1];
    const int l1 = std::abs(d.x) + std::abs(d.y) + std::abs(d.z);
    c[l1 - 1]++;
  }
  return c;
}

inline double cost_of(const StepCounts& c) { return c[0] + c[1] * std::sqrt(2.0) + c[2] * std::sqrt(3.0); }

/// Dijkstra over traversable voxels of a box; nullopt-like empty result when
/// unreachable (found = false).
struct ShortestPath {
  bool found = false;
  StepCounts counts{0, 0, 0};
  double cost = std::numeric_limits<double>::infinity();
};

inline ShortestPath dijkstra(const Grid& traversable, const GridIndex& start, const GridIndex& goal) {
  const auto nb = steps(26);
  std::vector<double> dist(traversable.cells.size(), std::numeric_limits<double>::infinity());
  std::vector<StepCounts> counts(traversable.cells.size(), StepCounts{0, 0, 0});
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  if (!traversable.get(start) || !traversable.get(goal)) return {};
  dist[traversable.flat(start)] = 0.0;
  open.push({0.0, traversable.flat(start)});
  std::vector<GridIndex> index(traversable.cells.size());
  for (int z = 0; z < traversable.nz; ++z)
    for (int y = 0; y < traversable.ny; ++y)
      for (int x = 0; x < traversable.nx; ++x) {
        const GridIndex g = traversable.lo + GridIndex{x, y, z};
        index[traversable.flat(g)] = g;
      }
  while (!open.empty()) {
    const auto [d, f] = open.top();
    open.pop();
    if (d > dist[f]) continue;
    for (const GridIndex& o : nb) {
      const GridIndex n = index[f] + o;
      if (!traversable.get(n)) continue;
      StepCounts c = counts[f];
      c[std::abs(o.x) + std::abs(o.y) + std::abs(o.z) - 1]++;
      const double nd = cost_of(c);
      const std::size_t fn = traversable.flat(n);
      if (nd < dist[fn] - 1e-9) {
        dist[fn] = nd;
        counts[fn] = c;
        open.push({nd, fn});
      }
    }
  }
  const std::size_t fg = traversable.flat(goal);
  if (!std::isfinite(dist[fg])) return {};
  return {true, counts[fg], dist[fg]};
}

/// Random obstacle field in an n^3 box of observed voxels: free voxels store
/// `clearance`, voxels inside random boxes store 0.
struct Fixture {
  skelplan::EsdfLayer esdf;
  Grid free;
};

inline Fixture random_fixture(std::mt19937& rng, int n, int boxes, double voxel_size, double clearance) {
  Fixture f{skelplan::EsdfLayer(voxel_size), Grid({0, 0, 0}, n, n, n)};
  std::fill(f.free.cells.begin(), f.free.cells.end(), 1);
  std::uniform_int_distribution<int> pos(0, n - 1);
  std::uniform_int_distribution<int> len(0, n / 3);
  for (int b = 0; b < boxes; ++b) {
    const GridIndex a{pos(rng), pos(rng), pos(rng)};
    const GridIndex e{std::min(n - 1, a.x + len(rng)), std::min(n - 1, a.y + len(rng)), std::min(n - 1, a.z + len(rng))};
    for (int z = a.z; z <= e.z; ++z)
      for (int y = a.y; y <= e.y; ++y)
        for (int x = a.x; x <= e.x; ++x) f.free.set({x, y, z}, false);
  }
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        skelplan::EsdfVoxel& v = f.esdf.at({x, y, z});
        v.observed = true;
        v.distance = f.free.get({x, y, z}) ? static_cast<float>(clearance) : 0.0f;
      }
  return f;
}

}  // namespace oracle
