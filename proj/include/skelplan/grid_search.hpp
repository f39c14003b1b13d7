#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <unordered_map>
#include <vector>

#include "skelplan/voxel_core.hpp"

namespace skelplan {

struct GridSearchResult {
  bool found = false;
  std::vector<GridIndex> path;  // start ... goal
  double cost = 0.0;            // in voxel units
  std::size_t expansions = 0;
};

/// Euclidean length of each offsets26() step.
inline const std::array<double, 26>& step_lengths26() {
  static const std::array<double, 26> lengths = [] {
    std::array<double, 26> out{};
    for (std::size_t i = 0; i < 26; ++i) out[i] = offsets26()[i].norm();
    return out;
  }();
  return lengths;
}

/// A* over the 26-connected grid with Euclidean step costs. Ties on f prefer
/// lower h, then the lexicographically smaller index. The search stops when a
/// voxel satisfying `is_goal` is expanded.
template <typename Traversable, typename Heuristic, typename IsGoal>
GridSearchResult grid_astar(const GridIndex& start, Traversable&& traversable, Heuristic&& heuristic,
                            IsGoal&& is_goal) {
  struct Record {
    double g;
    GridIndex parent;
    bool closed;
  };
  struct Entry {
    double f;
    double h;
    GridIndex index;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      return o.index < index;
    }
  };

  GridSearchResult result;
  std::unordered_map<GridIndex, Record, GridIndexHash> records;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const double h0 = heuristic(start);
  records[start] = {0.0, start, false};
  open.push({h0, h0, start});
  const auto& steps = offsets26();
  const auto& lengths = step_lengths26();

  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    Record& rec = records[top.index];
    if (rec.closed) continue;
    rec.closed = true;
    ++result.expansions;
    if (is_goal(top.index)) {
      result.found = true;
      result.cost = rec.g;
      for (GridIndex at = top.index;; at = records[at].parent) {
        result.path.push_back(at);
        if (at == start) break;
      }
      std::reverse(result.path.begin(), result.path.end());
      return result;
    }
    const double g = rec.g;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const GridIndex next = top.index + steps[i];
      const double candidate = g + lengths[i];
      auto it = records.find(next);
      if (it != records.end() && (it->second.closed || it->second.g <= candidate)) continue;
      if (it == records.end() && !traversable(next)) continue;
      records[next] = {candidate, top.index, false};
      const double h = heuristic(next);
      open.push({candidate + h, h, next});
    }
  }
  return result;
}

}  // namespace skelplan
