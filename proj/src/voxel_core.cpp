#include "skelplan/voxel_core.hpp"

#include <bit>

namespace skelplan {

namespace {

std::array<GridIndex, 26> make_offsets26() {
  std::array<GridIndex, 26> out{};
  int n = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx != 0 || dy != 0 || dz != 0) out[n++] = {dx, dy, dz};
  return out;
}

// adjacency[c][bit] = cells adjacent to cell `bit` under connectivity c.
struct AdjacencyTables {
  std::array<Neighborhood, 27> six{};
  std::array<Neighborhood, 27> eighteen{};
  std::array<Neighborhood, 27> twenty_six{};

  AdjacencyTables() {
    for (int a = 0; a < 27; ++a) {
      const GridIndex pa = cell_offset(a);
      for (int b = 0; b < 27; ++b) {
        if (a == b) continue;
        const GridIndex d = pa - cell_offset(b);
        const int manhattan = std::abs(d.x) + std::abs(d.y) + std::abs(d.z);
        const int chebyshev = std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)});
        if (chebyshev != 1) continue;
        const Neighborhood bit = Neighborhood{1} << b;
        twenty_six[a] |= bit;
        if (manhattan <= 2) eighteen[a] |= bit;
        if (manhattan == 1) six[a] |= bit;
      }
    }
  }

  const std::array<Neighborhood, 27>& for_connectivity(Connectivity c) const {
    switch (c) {
      case Connectivity::k6: return six;
      case Connectivity::k18: return eighteen;
      case Connectivity::k26: break;
    }
    return twenty_six;
  }
};

const AdjacencyTables& tables() {
  static const AdjacencyTables t;
  return t;
}

Neighborhood grow_component(Neighborhood seed, Neighborhood mask,
                            const std::array<Neighborhood, 27>& adjacency) {
  Neighborhood component = seed;
  Neighborhood frontier = seed;
  while (frontier != 0) {
    Neighborhood next = 0;
    while (frontier != 0) {
      const int bit = std::countr_zero(frontier);
      frontier &= frontier - 1;
      next |= adjacency[bit];
    }
    next &= mask & ~component;
    component |= next;
    frontier = next;
  }
  return component;
}

}  // namespace

const std::array<GridIndex, 26>& offsets26() {
  static const std::array<GridIndex, 26> offsets = make_offsets26();
  return offsets;
}

const std::array<GridIndex, 6>& offsets6() {
  static const std::array<GridIndex, 6> offsets{{{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};
  return offsets;
}

std::array<GridIndex, 26> neighbors26(const GridIndex& index) {
  std::array<GridIndex, 26> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = index + offsets26()[i];
  return out;
}

std::array<GridIndex, 6> neighbors6(const GridIndex& index) {
  std::array<GridIndex, 6> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = index + offsets6()[i];
  return out;
}

Neighborhood n18_mask() {
  static const Neighborhood mask = [] {
    Neighborhood m = 0;
    for (int bit = 0; bit < 27; ++bit) {
      const GridIndex o = cell_offset(bit);
      const int manhattan = std::abs(o.x) + std::abs(o.y) + std::abs(o.z);
      if (manhattan == 1 || manhattan == 2) m |= Neighborhood{1} << bit;
    }
    return m;
  }();
  return mask;
}

int connected_components(Neighborhood mask, Connectivity connectivity) {
  mask &= kFullMask & ~kCenterMask;
  if (connectivity == Connectivity::k6) mask &= n18_mask();
  const auto& adjacency = tables().for_connectivity(connectivity);
  int count = 0;
  Neighborhood remaining = mask;
  while (remaining != 0) {
    const Neighborhood seed = Neighborhood{1} << std::countr_zero(remaining);
    const Neighborhood component = grow_component(seed, mask, adjacency);
    remaining &= ~component;
    if (connectivity != Connectivity::k6 || (component & kFaceMask) != 0) ++count;
  }
  return count;
}

}  // namespace skelplan
