#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "skelplan/voxel_core.hpp"

namespace skelplan {

/// Little-endian layer dump:
///   "SKPL" | version u32 | voxel_size f64 | block side u32 | block count u64
///   per block: block index 3 x i64, then 16^3 records of
///              distance f32 | parent 3 x i8 | flags u8
/// ESDF flags: bit0 observed, bit1 fixed.
/// Skeleton flags: bit0 medial axis, bit1 edge, bit2 vertex (parent is zero).
inline constexpr std::uint32_t kLayerFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_layer(std::ostream& out, const EsdfLayer& layer);
void write_layer(std::ostream& out, const SkeletonLayer& layer);
EsdfLayer read_esdf_layer(std::istream& in);
SkeletonLayer read_skeleton_layer(std::istream& in);

void save_layer(const std::string& path, const EsdfLayer& layer);
void save_layer(const std::string& path, const SkeletonLayer& layer);
EsdfLayer load_esdf_layer(const std::string& path);
SkeletonLayer load_skeleton_layer(const std::string& path);

}  // namespace skelplan
