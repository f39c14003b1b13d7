#include "skelplan/layer_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace skelplan {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'P', 'L'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError("truncated layer file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::int8_t narrow_parent(int v) {
  if (v < std::numeric_limits<std::int8_t>::min() || v > std::numeric_limits<std::int8_t>::max())
    throw FormatError("parent offset does not fit in i8");
  return static_cast<std::int8_t>(v);
}

struct Record {
  float distance;
  GridIndex parent;
  std::uint8_t flags;
};

Record encode(const EsdfVoxel& v) {
  return {v.distance, v.parent, static_cast<std::uint8_t>((v.observed ? 1 : 0) | (v.fixed ? 2 : 0))};
}
void decode(const Record& r, EsdfVoxel& v) {
  v.distance = r.distance;
  v.parent = r.parent;
  v.observed = r.flags & 1;
  v.fixed = r.flags & 2;
}
Record encode(const SkeletonVoxel& v) {
  return {v.distance, {},
          static_cast<std::uint8_t>((v.on_medial_axis ? 1 : 0) | (v.is_edge ? 2 : 0) | (v.is_vertex ? 4 : 0))};
}
void decode(const Record& r, SkeletonVoxel& v) {
  v.distance = r.distance;
  v.on_medial_axis = r.flags & 1;
  v.is_edge = r.flags & 2;
  v.is_vertex = r.flags & 4;
  v.vertex_id.reset();
}

template <typename VoxelT>
void write_impl(std::ostream& out, const Layer<VoxelT>& layer) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kLayerFormatVersion);
  put<double>(out, layer.voxel_size());
  put<std::uint32_t>(out, kBlockSide);
  put<std::uint64_t>(out, layer.block_count());
  for (const GridIndex& b : layer.sorted_blocks()) {
    put<std::int64_t>(out, b.x);
    put<std::int64_t>(out, b.y);
    put<std::int64_t>(out, b.z);
    for (const VoxelT& voxel : *layer.find_block(b)) {
      const Record r = encode(voxel);
      put<float>(out, r.distance);
      put<std::int8_t>(out, narrow_parent(r.parent.x));
      put<std::int8_t>(out, narrow_parent(r.parent.y));
      put<std::int8_t>(out, narrow_parent(r.parent.z));
      put<std::uint8_t>(out, r.flags);
    }
  }
  if (!out) throw FormatError("failed to write layer");
}

template <typename VoxelT>
Layer<VoxelT> read_impl(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic");
  if (get<std::uint32_t>(in) != kLayerFormatVersion) throw FormatError("unsupported format version");
  const double voxel_size = get<double>(in);
  if (get<std::uint32_t>(in) != kBlockSide) throw FormatError("unsupported block side");
  const auto count = get<std::uint64_t>(in);
  Layer<VoxelT> layer(voxel_size);
  for (std::uint64_t i = 0; i < count; ++i) {
    GridIndex b;
    b.x = static_cast<int>(get<std::int64_t>(in));
    b.y = static_cast<int>(get<std::int64_t>(in));
    b.z = static_cast<int>(get<std::int64_t>(in));
    auto& block = layer.allocate_block(b);
    for (VoxelT& voxel : block) {
      Record r;
      r.distance = get<float>(in);
      r.parent.x = get<std::int8_t>(in);
      r.parent.y = get<std::int8_t>(in);
      r.parent.z = get<std::int8_t>(in);
      r.flags = get<std::uint8_t>(in);
      decode(r, voxel);
    }
  }
  return layer;
}

template <typename VoxelT>
void save_impl(const std::string& path, const Layer<VoxelT>& layer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path);
  write_impl(out, layer);
}

template <typename VoxelT>
Layer<VoxelT> load_impl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_impl<VoxelT>(in);
}

}  // namespace

void write_layer(std::ostream& out, const EsdfLayer& layer) { write_impl(out, layer); }
void write_layer(std::ostream& out, const SkeletonLayer& layer) { write_impl(out, layer); }
EsdfLayer read_esdf_layer(std::istream& in) { return read_impl<EsdfVoxel>(in); }
SkeletonLayer read_skeleton_layer(std::istream& in) { return read_impl<SkeletonVoxel>(in); }

void save_layer(const std::string& path, const EsdfLayer& layer) { save_impl(path, layer); }
void save_layer(const std::string& path, const SkeletonLayer& layer) { save_impl(path, layer); }
EsdfLayer load_esdf_layer(const std::string& path) { return load_impl<EsdfVoxel>(path); }
SkeletonLayer load_skeleton_layer(const std::string& path) { return load_impl<SkeletonVoxel>(path); }

}  // namespace skelplan
