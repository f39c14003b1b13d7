#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace skelplan {

using Point = Eigen::Vector3d;

/// Integer voxel coordinate. Also used for grid offsets (parents, steps).
struct GridIndex {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr GridIndex operator+(const GridIndex& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr GridIndex operator-(const GridIndex& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr GridIndex operator-() const { return {-x, -y, -z}; }
  constexpr bool is_zero() const { return x == 0 && y == 0 && z == 0; }
  constexpr auto operator<=>(const GridIndex&) const = default;

  Point cast() const { return Point(x, y, z); }
  double norm() const { return cast().norm(); }
};

struct GridIndexHash {
  std::size_t operator()(const GridIndex& i) const noexcept {
    // Large primes spread neighbouring blocks over buckets.
    return static_cast<std::size_t>(i.x) * 73856093u ^ static_cast<std::size_t>(i.y) * 19349663u ^
           static_cast<std::size_t>(i.z) * 83492791u;
  }
};

inline constexpr int kBlockSide = 16;
inline constexpr int kBlockShift = 4;
inline constexpr int kVoxelsPerBlock = kBlockSide * kBlockSide * kBlockSide;

/// Voxel-center convention: position = (index + 0.5) * voxel_size.
inline Point index_to_position(const GridIndex& i, double voxel_size) {
  return (i.cast().array() + 0.5).matrix() * voxel_size;
}

inline GridIndex position_to_index(const Point& p, double voxel_size) {
  const Eigen::Vector3d s = p / voxel_size;
  return {static_cast<int>(std::floor(s.x())), static_cast<int>(std::floor(s.y())),
          static_cast<int>(std::floor(s.z()))};
}

inline GridIndex block_of(const GridIndex& i) {
  return {i.x >> kBlockShift, i.y >> kBlockShift, i.z >> kBlockShift};
}

inline int linear_in_block(const GridIndex& i) {
  constexpr int mask = kBlockSide - 1;
  return (i.x & mask) + kBlockSide * ((i.y & mask) + kBlockSide * (i.z & mask));
}

inline GridIndex from_linear_in_block(const GridIndex& block, int linear) {
  return {block.x * kBlockSide + linear % kBlockSide,
          block.y * kBlockSide + (linear / kBlockSide) % kBlockSide,
          block.z * kBlockSide + linear / (kBlockSide * kBlockSide)};
}

/// Dense voxel grid stored as a hash map of fixed-size blocks.
///
/// Reads through `find` are safe from several threads; every mutating call
/// (`at`, `allocate_block`, `erase_block`) requires exclusive access.
template <typename VoxelT>
class Layer {
 public:
  using Block = std::array<VoxelT, kVoxelsPerBlock>;

  explicit Layer(double voxel_size) : voxel_size_(voxel_size) {
    if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be positive");
  }

  double voxel_size() const { return voxel_size_; }
  std::size_t block_count() const { return blocks_.size(); }

  const VoxelT* find(const GridIndex& i) const {
    auto it = blocks_.find(block_of(i));
    return it == blocks_.end() ? nullptr : &(*it->second)[linear_in_block(i)];
  }
  VoxelT* find(const GridIndex& i) {
    auto it = blocks_.find(block_of(i));
    return it == blocks_.end() ? nullptr : &(*it->second)[linear_in_block(i)];
  }

  /// Returns the voxel, allocating its block on first touch.
  VoxelT& at(const GridIndex& i) { return allocate_block(block_of(i))[linear_in_block(i)]; }

  Block& allocate_block(const GridIndex& block_index) {
    auto& slot = blocks_[block_index];
    if (!slot) slot = std::make_unique<Block>();
    return *slot;
  }
  const Block* find_block(const GridIndex& block_index) const {
    auto it = blocks_.find(block_index);
    return it == blocks_.end() ? nullptr : it->second.get();
  }
  Block* find_block(const GridIndex& block_index) {
    auto it = blocks_.find(block_index);
    return it == blocks_.end() ? nullptr : it->second.get();
  }
  void erase_block(const GridIndex& block_index) { blocks_.erase(block_index); }

  Point center(const GridIndex& i) const { return index_to_position(i, voxel_size_); }
  GridIndex index_of(const Point& p) const { return position_to_index(p, voxel_size_); }

  /// Block indices in lexicographic (x, y, z) order.
  std::vector<GridIndex> sorted_blocks() const {
    std::vector<GridIndex> out;
    out.reserve(blocks_.size());
    for (const auto& [k, _] : blocks_) out.push_back(k);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Visits every allocated voxel in deterministic (block, voxel) order.
  template <typename F>
  void for_each(F&& fn) const {
    for (const GridIndex& b : sorted_blocks()) {
      const Block& block = *blocks_.at(b);
      for (int l = 0; l < kVoxelsPerBlock; ++l) fn(from_linear_in_block(b, l), block[l]);
    }
  }
  template <typename F>
  void for_each_mutable(F&& fn) {
    for (const GridIndex& b : sorted_blocks()) {
      Block& block = *blocks_.at(b);
      for (int l = 0; l < kVoxelsPerBlock; ++l) fn(from_linear_in_block(b, l), block[l]);
    }
  }

 private:
  double voxel_size_;
  std::unordered_map<GridIndex, std::unique_ptr<Block>, GridIndexHash> blocks_;
};

struct EsdfVoxel {
  float distance = 0.0f;
  GridIndex parent{};  // offset from this voxel to its closest surface voxel
  bool observed = false;
  bool fixed = false;  // seeded directly from the surface band
};

using VertexId = std::int64_t;

struct SkeletonVoxel {
  float distance = 0.0f;
  bool on_medial_axis = false;
  bool is_edge = false;
  bool is_vertex = false;
  std::optional<VertexId> vertex_id;

  bool on_diagram() const { return is_edge || is_vertex; }
};

struct TsdfVoxel {
  float distance = 0.0f;
  float weight = 0.0f;
};

using EsdfLayer = Layer<EsdfVoxel>;
using SkeletonLayer = Layer<SkeletonVoxel>;
using TsdfLayer = Layer<TsdfVoxel>;

// ---------------------------------------------------------------------------
// Neighborhoods

/// Offsets with Chebyshev distance 1, x fastest then y then z.
const std::array<GridIndex, 26>& offsets26();
/// Unit offsets in the order -x, +x, -y, +y, -z, +z.
const std::array<GridIndex, 6>& offsets6();

std::array<GridIndex, 26> neighbors26(const GridIndex& index);
std::array<GridIndex, 6> neighbors6(const GridIndex& index);

/// 3x3x3 occupancy mask. Bit (dx+1) + 3(dy+1) + 9(dz+1) holds cell (dx, dy, dz).
using Neighborhood = std::uint32_t;

inline constexpr int kCenterBit = 13;
inline constexpr Neighborhood kCenterMask = Neighborhood{1} << kCenterBit;
inline constexpr Neighborhood kFullMask = (Neighborhood{1} << 27) - 1;

constexpr int cell_bit(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }
constexpr int cell_bit(const GridIndex& o) { return cell_bit(o.x, o.y, o.z); }
constexpr GridIndex cell_offset(int bit) { return {bit % 3 - 1, (bit / 3) % 3 - 1, bit / 9 - 1}; }

inline bool test_cell(Neighborhood n, const GridIndex& o) { return (n >> cell_bit(o)) & 1u; }

/// Cells 6-adjacent to the center.
inline constexpr Neighborhood kFaceMask =
    (1u << cell_bit(-1, 0, 0)) | (1u << cell_bit(1, 0, 0)) | (1u << cell_bit(0, -1, 0)) |
    (1u << cell_bit(0, 1, 0)) | (1u << cell_bit(0, 0, -1)) | (1u << cell_bit(0, 0, 1));
/// The 18-neighborhood (faces and edges, no corners, no center).
Neighborhood n18_mask();

enum class Connectivity { k6 = 6, k18 = 18, k26 = 26 };

/// Number of connected components among the true cells of `mask` (the center
/// is ignored). For `k6` the standard simple-point convention applies: only
/// the 18-neighborhood is considered and only components containing a face
/// cell are counted.
int connected_components(Neighborhood mask, Connectivity connectivity);

/// Reads a 3x3x3 neighborhood around `center` from `layer` using `pred`.
template <typename VoxelT, typename Pred>
Neighborhood read_neighborhood(const Layer<VoxelT>& layer, const GridIndex& center, Pred&& pred) {
  Neighborhood n = 0;
  for (int bit = 0; bit < 27; ++bit) {
    const VoxelT* v = layer.find(center + cell_offset(bit));
    if (v != nullptr && pred(*v)) n |= Neighborhood{1} << bit;
  }
  return n;
}

}  // namespace skelplan
