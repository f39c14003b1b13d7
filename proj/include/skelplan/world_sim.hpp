#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Geometry>
#include "json.hpp"

#include "skelplan/voxel_core.hpp"

namespace skelplan {

struct Aabb {
  Point min = Point::Zero();
  Point max = Point::Zero();

  bool contains(const Point& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Point size() const { return max - min; }
};

struct BoxPrimitive {
  Point center;
  Point half_extents;
};

/// Vertical (z-aligned) cylinder; `center` is the mid-height point.
struct CylinderPrimitive {
  Point center;
  double radius;
  double height;
};

struct SpherePrimitive {
  Point center;
  double radius;
};

/// Horizontal half-space. A ground plane is solid below `height`, a ceiling
/// plane is solid above it.
struct PlanePrimitive {
  enum class Kind { kGround, kCeiling };
  Kind kind;
  double height;
};

using Primitive = std::variant<BoxPrimitive, CylinderPrimitive, SpherePrimitive, PlanePrimitive>;

double signed_distance(const Primitive& primitive, const Point& p);
Point closest_surface_point(const Primitive& primitive, const Point& p);
/// Smallest t > 0 where origin + t * dir (unit dir) enters the primitive.
std::optional<double> ray_intersection(const Primitive& primitive, const Point& origin, const Point& dir);
Aabb primitive_bounds(const Primitive& primitive, const Aabb& world_bounds);

/// Analytic scene with exact distance queries.
class PrimitiveWorld {
 public:
  PrimitiveWorld() = default;
  PrimitiveWorld(std::vector<Primitive> primitives, Aabb bounds);

  const std::vector<Primitive>& primitives() const { return primitives_; }
  const Aabb& bounds() const { return bounds_; }
  void add(Primitive p);

  /// Minimum over primitive signed distances; negative inside.
  double exact_distance(const Point& p) const;
  /// Closest point on the surface of the primitive realizing exact_distance.
  Point closest_point(const Point& p) const;
  /// First surface hit along the ray within max_range, if any.
  std::optional<double> cast_ray(const Point& origin, const Point& dir, double max_range) const;
  /// Same as cast_ray restricted to a subset of primitives (see cull_for_view).
  std::optional<double> cast_ray(const Point& origin, const Point& dir, double max_range,
                                 const std::vector<std::size_t>& subset) const;
  /// Indices of primitives whose bounds intersect the sphere around `origin`.
  std::vector<std::size_t> cull_for_view(const Point& origin, double max_range) const;

 private:
  std::vector<Primitive> primitives_;
  std::vector<Aabb> primitive_bounds_;
  Aabb bounds_;
};

nlohmann::json world_to_json(const PrimitiveWorld& world);
PrimitiveWorld world_from_json(const nlohmann::json& j);
void save_world(const std::string& path, const PrimitiveWorld& world);
PrimitiveWorld load_world(const std::string& path);

// ---------------------------------------------------------------------------
// Sensor simulation

struct DepthCamera {
  double horizontal_fov = M_PI / 2.0;
  int width = 320;
  int height = 240;
  double max_range = 8.0;
  double noise_sigma = 0.0;

  void validate() const;
  double focal_length() const;
  /// Unit-z ray (x, y, 1) through the center of pixel (u, v) in camera frame
  /// (x right, y down, z forward).
  Point pixel_ray(int u, int v) const;
};

/// z-depth image; invalid pixels hold NaN.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<float> depth;

  float at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  static bool valid(float d) { return d == d; }
};

using Pose = Eigen::Isometry3d;

/// Camera pose looking along body +x at `yaw`, zero pitch and roll.
Pose camera_pose(const Point& position, double yaw);

/// Noise-free depth image by analytic ray casting.
DepthImage render_depth_exact(const PrimitiveWorld& world, const Pose& pose, const DepthCamera& cam);
/// Adds independent N(0, sigma^2) noise to every valid pixel.
void add_depth_noise(DepthImage& image, double sigma, std::uint64_t seed);
/// render_depth_exact followed by add_depth_noise with cam.noise_sigma.
DepthImage render_depth(const PrimitiveWorld& world, const Pose& pose, const DepthCamera& cam,
                        std::uint64_t rng_seed);

struct TsdfConfig {
  double truncation_voxels = 4.0;
};

/// Fuses one depth image. Each ray updates a band of +-truncation around its hit,
/// with weight fading behind the surface. Voxels in `region` seen fully in free
/// space are then set to +truncation.
void integrate_tsdf(TsdfLayer& layer, const DepthImage& image, const Pose& pose, const DepthCamera& cam,
                    const Aabb& region, const TsdfConfig& config = {});

/// Uniform positions with clearance, uniform yaw.
std::vector<Pose> sample_free_poses(const PrimitiveWorld& world, std::size_t count, double min_clearance,
                                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// ESDF

struct EsdfConfig {
  double max_distance = 5.0;
  /// TSDF voxels with |distance| below this many voxel sizes seed the wavefront.
  double surface_band_voxels = 1.0;
};

class NoSurfaceError : public std::runtime_error {
 public:
  NoSurfaceError() : std::runtime_error("no surface") {}
};

/// Brushfire wavefront from the TSDF surface band.
EsdfLayer build_esdf(const TsdfLayer& tsdf, const EsdfConfig& config = {});
/// Ground-truth ESDF over the world bounds from exact distances.
EsdfLayer build_esdf(const PrimitiveWorld& world, double voxel_size, const EsdfConfig& config = {});

/// Voxel index range [lo, hi] whose centers lie inside `box`.
std::pair<GridIndex, GridIndex> index_range(const Aabb& box, double voxel_size);

// ---------------------------------------------------------------------------
// Mazes

struct MazeSpec {
  double side = 30.0;
  double cell = 1.5;
  double wall_height = 1.4;
  double wall_thickness = 0.2;
  std::uint64_t seed = 1;
};

/// Cell grid produced by the recursive backtracker. open_east(x, y) means
/// cell (x, y) connects to (x + 1, y); open_north to (x, y + 1).
struct MazeLayout {
  int cells = 0;
  std::vector<bool> east;
  std::vector<bool> north;

  bool open_east(int x, int y) const { return east[static_cast<std::size_t>(y) * cells + x]; }
  bool open_north(int x, int y) const { return north[static_cast<std::size_t>(y) * cells + x]; }
};

MazeLayout generate_maze_layout(const MazeSpec& spec);
PrimitiveWorld maze_world(const MazeSpec& spec, const MazeLayout& layout);
PrimitiveWorld generate_maze(const MazeSpec& spec);
/// Cell centers at mid height.
std::vector<Point> maze_cell_centers(const MazeSpec& spec);
/// Scripted coverage: four yaws at every cell center.
std::vector<Pose> maze_coverage_poses(const MazeSpec& spec);

/// Fixture environment for the resolution / noise study.
PrimitiveWorld make_sim_world();

}  // namespace skelplan
