#include "skelplan/world_sim.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

namespace skelplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double box_sdf(const BoxPrimitive& b, const Point& p) {
  const Eigen::Vector3d q = (p - b.center).cwiseAbs() - b.half_extents;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

Point box_closest(const BoxPrimitive& b, const Point& p) {
  const Eigen::Vector3d local = p - b.center;
  const Eigen::Vector3d q = local.cwiseAbs() - b.half_extents;
  if ((q.array() > 0.0).any()) return b.center + local.cwiseMax(-b.half_extents).cwiseMin(b.half_extents);
  int axis = 0;
  q.maxCoeff(&axis);
  Point out = p;
  out[axis] = b.center[axis] + (local[axis] >= 0.0 ? b.half_extents[axis] : -b.half_extents[axis]);
  return out;
}

double cylinder_sdf(const CylinderPrimitive& c, const Point& p) {
  const double dr = (p - c.center).head<2>().norm() - c.radius;
  const double dz = std::abs(p.z() - c.center.z()) - 0.5 * c.height;
  return std::min(std::max(dr, dz), 0.0) + Eigen::Vector2d(std::max(dr, 0.0), std::max(dz, 0.0)).norm();
}

Point cylinder_closest(const CylinderPrimitive& c, const Point& p) {
  Eigen::Vector2d radial = (p - c.center).head<2>();
  const double r = radial.norm();
  const Eigen::Vector2d dir = r > 1e-12 ? Eigen::Vector2d(radial / r) : Eigen::Vector2d(1.0, 0.0);
  const double dr = r - c.radius;
  const double half = 0.5 * c.height;
  const double dz = std::abs(p.z() - c.center.z()) - half;
  Point out = p;
  if (dr > 0.0 || dz > 0.0) {
    if (dr > 0.0) out.head<2>() = c.center.head<2>() + dir * c.radius;
    out.z() = std::clamp(p.z(), c.center.z() - half, c.center.z() + half);
  } else if (dr > dz) {
    out.head<2>() = c.center.head<2>() + dir * c.radius;
  } else {
    out.z() = c.center.z() + (p.z() >= c.center.z() ? half : -half);
  }
  return out;
}

double sphere_sdf(const SpherePrimitive& s, const Point& p) { return (p - s.center).norm() - s.radius; }

Point sphere_closest(const SpherePrimitive& s, const Point& p) {
  const Eigen::Vector3d d = p - s.center;
  const double n = d.norm();
  return s.center + (n > 1e-12 ? Eigen::Vector3d(d / n) : Eigen::Vector3d::UnitX()) * s.radius;
}

double plane_sdf(const PlanePrimitive& pl, const Point& p) {
  return pl.kind == PlanePrimitive::Kind::kGround ? p.z() - pl.height : pl.height - p.z();
}

// Entry parameter of the interval [lo, hi] clipped to t >= 0.
std::optional<double> entry_of(double lo, double hi) {
  if (hi < 0.0 || lo > hi) return std::nullopt;
  return std::max(lo, 0.0);
}

std::optional<double> ray_box(const BoxPrimitive& b, const Point& o, const Point& d) {
  double lo = -kInf, hi = kInf;
  for (int a = 0; a < 3; ++a) {
    const double mn = b.center[a] - b.half_extents[a];
    const double mx = b.center[a] + b.half_extents[a];
    if (std::abs(d[a]) < 1e-15) {
      if (o[a] < mn || o[a] > mx) return std::nullopt;
      continue;
    }
    double t0 = (mn - o[a]) / d[a];
    double t1 = (mx - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
  }
  return entry_of(lo, hi);
}

std::optional<double> ray_sphere(const SpherePrimitive& s, const Point& o, const Point& d) {
  const Eigen::Vector3d oc = o - s.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  return entry_of(-b - root, -b + root);
}

std::optional<double> ray_cylinder(const CylinderPrimitive& c, const Point& o, const Point& d) {
  double lo = -kInf, hi = kInf;
  const Eigen::Vector2d oc = (o - c.center).head<2>();
  const Eigen::Vector2d dd = d.head<2>();
  const double a = dd.squaredNorm();
  const double cc = oc.squaredNorm() - c.radius * c.radius;
  if (a < 1e-15) {
    if (cc > 0.0) return std::nullopt;
  } else {
    const double b = oc.dot(dd);
    const double disc = b * b - a * cc;
    if (disc < 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    lo = (-b - root) / a;
    hi = (-b + root) / a;
  }
  const double zlo = c.center.z() - 0.5 * c.height;
  const double zhi = c.center.z() + 0.5 * c.height;
  if (std::abs(d.z()) < 1e-15) {
    if (o.z() < zlo || o.z() > zhi) return std::nullopt;
  } else {
    double t0 = (zlo - o.z()) / d.z();
    double t1 = (zhi - o.z()) / d.z();
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
  }
  return entry_of(lo, hi);
}

std::optional<double> ray_plane(const PlanePrimitive& pl, const Point& o, const Point& d) {
  if (plane_sdf(pl, o) <= 0.0) return 0.0;
  const double toward = pl.kind == PlanePrimitive::Kind::kGround ? -d.z() : d.z();
  if (toward <= 1e-15) return std::nullopt;
  return std::abs(o.z() - pl.height) / toward;
}

double aabb_distance(const Aabb& box, const Point& p) {
  const Eigen::Vector3d below = (box.min - p).cwiseMax(0.0);
  const Eigen::Vector3d above = (p - box.max).cwiseMax(0.0);
  return (below + above).norm();
}

Eigen::Vector3d to_vec(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}
nlohmann::json from_vec(const Eigen::Vector3d& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

}  // namespace

double signed_distance(const Primitive& primitive, const Point& p) {
  return std::visit(Overloaded{[&](const BoxPrimitive& b) { return box_sdf(b, p); },
                               [&](const CylinderPrimitive& c) { return cylinder_sdf(c, p); },
                               [&](const SpherePrimitive& s) { return sphere_sdf(s, p); },
                               [&](const PlanePrimitive& pl) { return plane_sdf(pl, p); }},
                    primitive);
}

Point closest_surface_point(const Primitive& primitive, const Point& p) {
  return std::visit(Overloaded{[&](const BoxPrimitive& b) { return box_closest(b, p); },
                               [&](const CylinderPrimitive& c) { return cylinder_closest(c, p); },
                               [&](const SpherePrimitive& s) { return sphere_closest(s, p); },
                               [&](const PlanePrimitive& pl) { return Point(p.x(), p.y(), pl.height); }},
                    primitive);
}

std::optional<double> ray_intersection(const Primitive& primitive, const Point& origin, const Point& dir) {
  return std::visit(Overloaded{[&](const BoxPrimitive& b) { return ray_box(b, origin, dir); },
                               [&](const CylinderPrimitive& c) { return ray_cylinder(c, origin, dir); },
                               [&](const SpherePrimitive& s) { return ray_sphere(s, origin, dir); },
                               [&](const PlanePrimitive& pl) { return ray_plane(pl, origin, dir); }},
                    primitive);
}

Aabb primitive_bounds(const Primitive& primitive, const Aabb& world_bounds) {
  return std::visit(
      Overloaded{[](const BoxPrimitive& b) { return Aabb{b.center - b.half_extents, b.center + b.half_extents}; },
                 [](const CylinderPrimitive& c) {
                   const Point ext(c.radius, c.radius, 0.5 * c.height);
                   return Aabb{c.center - ext, c.center + ext};
                 },
                 [](const SpherePrimitive& s) {
                   return Aabb{s.center.array() - s.radius, s.center.array() + s.radius};
                 },
                 [&](const PlanePrimitive& pl) {
                   Aabb box = world_bounds;
                   if (pl.kind == PlanePrimitive::Kind::kGround) {
                     box.min.z() = std::min(box.min.z(), pl.height) - 1.0;
                     box.max.z() = pl.height;
                   } else {
                     box.min.z() = pl.height;
                     box.max.z() = std::max(box.max.z(), pl.height) + 1.0;
                   }
                   return box;
                 }},
      primitive);
}

PrimitiveWorld::PrimitiveWorld(std::vector<Primitive> primitives, Aabb bounds) : bounds_(bounds) {
  for (auto& p : primitives) add(std::move(p));
}

void PrimitiveWorld::add(Primitive p) {
  std::visit(Overloaded{[](const BoxPrimitive& b) {
                          if ((b.half_extents.array() <= 0.0).any())
                            throw std::invalid_argument("box half extents must be positive");
                        },
                        [](const CylinderPrimitive& c) {
                          if (c.radius <= 0.0 || c.height <= 0.0)
                            throw std::invalid_argument("cylinder radius and height must be positive");
                        },
                        [](const SpherePrimitive& s) {
                          if (s.radius <= 0.0) throw std::invalid_argument("sphere radius must be positive");
                        },
                        [](const PlanePrimitive&) {}},
             p);
  primitive_bounds_.push_back(primitive_bounds(p, bounds_));
  primitives_.push_back(std::move(p));
}

double PrimitiveWorld::exact_distance(const Point& p) const {
  double best = kInf;
  for (const auto& prim : primitives_) best = std::min(best, signed_distance(prim, p));
  return best;
}

Point PrimitiveWorld::closest_point(const Point& p) const {
  double best = kInf;
  const Primitive* arg = nullptr;
  for (const auto& prim : primitives_) {
    const double d = signed_distance(prim, p);
    if (d < best) {
      best = d;
      arg = &prim;
    }
  }
  return arg == nullptr ? p : closest_surface_point(*arg, p);
}

std::optional<double> PrimitiveWorld::cast_ray(const Point& origin, const Point& dir, double max_range) const {
  double best = kInf;
  for (const auto& prim : primitives_) {
    if (auto t = ray_intersection(prim, origin, dir); t && *t < best) best = *t;
  }
  if (best > max_range) return std::nullopt;
  return best;
}

std::optional<double> PrimitiveWorld::cast_ray(const Point& origin, const Point& dir, double max_range,
                                               const std::vector<std::size_t>& subset) const {
  double best = kInf;
  for (std::size_t i : subset) {
    if (auto t = ray_intersection(primitives_[i], origin, dir); t && *t < best) best = *t;
  }
  if (best > max_range) return std::nullopt;
  return best;
}

std::vector<std::size_t> PrimitiveWorld::cull_for_view(const Point& origin, double max_range) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < primitives_.size(); ++i)
    if (aabb_distance(primitive_bounds_[i], origin) <= max_range) out.push_back(i);
  return out;
}

nlohmann::json world_to_json(const PrimitiveWorld& world) {
  nlohmann::json prims = nlohmann::json::array();
  for (const auto& prim : world.primitives()) {
    prims.push_back(std::visit(
        Overloaded{[](const BoxPrimitive& b) {
                     return nlohmann::json{
                         {"type", "box"}, {"center", from_vec(b.center)}, {"half_extents", from_vec(b.half_extents)}};
                   },
                   [](const CylinderPrimitive& c) {
                     return nlohmann::json{{"type", "cylinder"},
                                           {"center", from_vec(c.center)},
                                           {"radius", c.radius},
                                           {"height", c.height}};
                   },
                   [](const SpherePrimitive& s) {
                     return nlohmann::json{{"type", "sphere"}, {"center", from_vec(s.center)}, {"radius", s.radius}};
                   },
                   [](const PlanePrimitive& pl) {
                     return nlohmann::json{{"type", "plane"},
                                           {"kind", pl.kind == PlanePrimitive::Kind::kGround ? "ground" : "ceiling"},
                                           {"height", pl.height}};
                   }},
        prim));
  }
  return {{"bounds", {{"min", from_vec(world.bounds().min)}, {"max", from_vec(world.bounds().max)}}},
          {"primitives", prims}};
}

PrimitiveWorld world_from_json(const nlohmann::json& j) {
  Aabb bounds{to_vec(j.at("bounds").at("min")), to_vec(j.at("bounds").at("max"))};
  if ((bounds.max.array() <= bounds.min.array()).any()) throw std::invalid_argument("empty world bounds");
  PrimitiveWorld world({}, bounds);
  for (const auto& p : j.at("primitives")) {
    const auto type = p.at("type").get<std::string>();
    if (type == "box") {
      world.add(BoxPrimitive{to_vec(p.at("center")), to_vec(p.at("half_extents"))});
    } else if (type == "cylinder") {
      world.add(CylinderPrimitive{to_vec(p.at("center")), p.at("radius").get<double>(), p.at("height").get<double>()});
    } else if (type == "sphere") {
      world.add(SpherePrimitive{to_vec(p.at("center")), p.at("radius").get<double>()});
    } else if (type == "plane") {
      const auto kind = p.at("kind").get<std::string>();
      if (kind != "ground" && kind != "ceiling") throw std::invalid_argument("unknown plane kind: " + kind);
      world.add(PlanePrimitive{kind == "ground" ? PlanePrimitive::Kind::kGround : PlanePrimitive::Kind::kCeiling,
                               p.at("height").get<double>()});
    } else {
      throw std::invalid_argument("unknown primitive type: " + type);
    }
  }
  return world;
}

void save_world(const std::string& path, const PrimitiveWorld& world) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << world_to_json(world).dump(2) << '\n';
}

PrimitiveWorld load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return world_from_json(nlohmann::json::parse(in));
}

// ---------------------------------------------------------------------------

void DepthCamera::validate() const {
  if (!(horizontal_fov > 0.0 && horizontal_fov < M_PI)) throw std::invalid_argument("fov must be in (0, pi)");
  if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be non-negative");
  if (width <= 0 || height <= 0) throw std::invalid_argument("resolution must be positive");
  if (max_range <= 0.0) throw std::invalid_argument("max_range must be positive");
}

double DepthCamera::focal_length() const { return 0.5 * width / std::tan(0.5 * horizontal_fov); }

Point DepthCamera::pixel_ray(int u, int v) const {
  const double f = focal_length();
  return {(u + 0.5 - 0.5 * width) / f, (v + 0.5 - 0.5 * height) / f, 1.0};
}

Pose camera_pose(const Point& position, double yaw) {
  const Point forward(std::cos(yaw), std::sin(yaw), 0.0);
  const Point left(-std::sin(yaw), std::cos(yaw), 0.0);
  Eigen::Matrix3d r;
  r.col(0) = -left;
  r.col(1) = -Point::UnitZ();
  r.col(2) = forward;
  Pose pose = Pose::Identity();
  pose.linear() = r;
  pose.translation() = position;
  return pose;
}

DepthImage render_depth_exact(const PrimitiveWorld& world, const Pose& pose, const DepthCamera& cam) {
  cam.validate();
  DepthImage image{cam.width, cam.height,
                   std::vector<float>(static_cast<std::size_t>(cam.width) * cam.height,
                                      std::numeric_limits<float>::quiet_NaN())};
  const Point origin = pose.translation();
  const auto subset = world.cull_for_view(origin, cam.max_range);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Point ray = cam.pixel_ray(u, v);
      const double norm = ray.norm();
      const Point dir = pose.linear() * (ray / norm);
      if (auto t = world.cast_ray(origin, dir, cam.max_range, subset))
        image.depth[static_cast<std::size_t>(v) * cam.width + u] = static_cast<float>(*t / norm);
    }
  }
  return image;
}

void add_depth_noise(DepthImage& image, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("noise sigma must be non-negative");
  if (sigma == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (float& d : image.depth) {
    if (DepthImage::valid(d)) d = static_cast<float>(d + noise(rng));
  }
}

DepthImage render_depth(const PrimitiveWorld& world, const Pose& pose, const DepthCamera& cam,
                        std::uint64_t rng_seed) {
  DepthImage image = render_depth_exact(world, pose, cam);
  add_depth_noise(image, cam.noise_sigma, rng_seed);
  return image;
}

std::pair<GridIndex, GridIndex> index_range(const Aabb& box, double voxel_size) {
  auto lo = [&](double v) { return static_cast<int>(std::ceil(v / voxel_size - 0.5)); };
  auto hi = [&](double v) { return static_cast<int>(std::floor(v / voxel_size - 0.5)); };
  return {{lo(box.min.x()), lo(box.min.y()), lo(box.min.z())}, {hi(box.max.x()), hi(box.max.y()), hi(box.max.z())}};
}

namespace {

void update_tsdf_voxel(TsdfLayer& layer, const GridIndex& idx, double observed, double weight) {
  TsdfVoxel& voxel = layer.at(idx);
  voxel.distance = static_cast<float>((voxel.weight * voxel.distance + weight * observed) / (voxel.weight + weight));
  voxel.weight += static_cast<float>(weight);
}

// Visits every voxel the segment origin + t * dir, t in [t0, t1], passes through.
template <typename Visit>
void traverse_voxels(const Point& origin, const Point& dir, double t0, double t1, double vs, Visit&& visit) {
  const Point start = origin + t0 * dir;
  GridIndex idx = position_to_index(start, vs);
  int step[3];
  double t_max[3];
  double t_delta[3];
  for (int a = 0; a < 3; ++a) {
    const int cell = a == 0 ? idx.x : (a == 1 ? idx.y : idx.z);
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_max[a] = t0 + ((cell + 1) * vs - start[a]) / dir[a];
      t_delta[a] = vs / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_max[a] = t0 + (cell * vs - start[a]) / dir[a];
      t_delta[a] = -vs / dir[a];
    } else {
      step[a] = 0;
      t_max[a] = kInf;
      t_delta[a] = kInf;
    }
  }
  for (;;) {
    visit(idx);
    const int a = t_max[0] < t_max[1] ? (t_max[0] < t_max[2] ? 0 : 2) : (t_max[1] < t_max[2] ? 1 : 2);
    if (t_max[a] > t1) return;
    (a == 0 ? idx.x : (a == 1 ? idx.y : idx.z)) += step[a];
    t_max[a] += t_delta[a];
  }
}

}  // namespace

void integrate_tsdf(TsdfLayer& layer, const DepthImage& image, const Pose& pose, const DepthCamera& cam,
                    const Aabb& region, const TsdfConfig& config) {
  cam.validate();
  if (image.width != cam.width || image.height != cam.height)
    throw std::invalid_argument("depth image does not match camera resolution");
  const double vs = layer.voxel_size();
  const double trunc = config.truncation_voxels * vs;
  const double f = cam.focal_length();
  const double reach = cam.max_range + trunc;
  const Pose world_to_cam = pose.inverse();
  const Point origin = pose.translation();

  Aabb box;
  box.min = region.min.cwiseMax((origin.array() - reach).matrix());
  box.max = region.max.cwiseMin((origin.array() + reach).matrix());
  if ((box.max.array() < box.min.array()).any()) return;
  const auto [lo, hi] = index_range(box, vs);
  auto inside = [&](const GridIndex& i) {
    return i.x >= lo.x && i.y >= lo.y && i.z >= lo.z && i.x <= hi.x && i.y <= hi.y && i.z <= hi.z;
  };

  // Truncation band: every ray updates each voxel it crosses near its hit.
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const float depth = image.at(u, v);
      if (!DepthImage::valid(depth) || depth <= 0.0f) continue;
      const Point ray = cam.pixel_ray(u, v);
      const double norm = ray.norm();
      const Point dir = pose.linear() * (ray / norm);
      const double range = depth * norm;
      traverse_voxels(origin, dir, std::max(0.0, range - trunc), range + trunc, vs, [&](const GridIndex& idx) {
        if (!inside(idx)) return;
        const double sdf = range - (index_to_position(idx, vs) - origin).dot(dir);
        if (sdf <= -trunc || sdf >= trunc) return;
        // Behind the hit the ray may already have left a thin or cornered
        // object, so trust fades linearly to zero at the truncation distance.
        const double weight = sdf >= -vs ? 1.0 : (trunc + sdf) / (trunc - vs);
        update_tsdf_voxel(layer, idx, sdf, weight);
      });
    }
  }

  // Free space in front of the band, one projective update per voxel.
  const GridIndex block_lo = block_of(lo);
  const GridIndex block_hi = block_of(hi);
  for (int bz = block_lo.z; bz <= block_hi.z; ++bz)
    for (int by = block_lo.y; by <= block_hi.y; ++by)
      for (int bx = block_lo.x; bx <= block_hi.x; ++bx) {
        const GridIndex block_index{bx, by, bz};
        TsdfLayer::Block* block = layer.find_block(block_index);
        for (int l = 0; l < kVoxelsPerBlock; ++l) {
          const GridIndex idx = from_linear_in_block(block_index, l);
          if (!inside(idx)) continue;
          const Point pc = world_to_cam * index_to_position(idx, vs);
          if (pc.z() <= 1e-6) continue;
          const double range = pc.norm();
          if (range > reach) continue;
          const double uf = f * pc.x() / pc.z() + 0.5 * cam.width;
          const double vf = f * pc.y() / pc.z() + 0.5 * cam.height;
          if (uf < 0.0 || vf < 0.0 || uf >= cam.width || vf >= cam.height) continue;
          const float depth = image.at(static_cast<int>(uf), static_cast<int>(vf));
          if (!DepthImage::valid(depth)) continue;
          const double sdf = (depth - pc.z()) * (range / pc.z());
          if (sdf < trunc) continue;
          if (block == nullptr) block = &layer.allocate_block(block_index);
          TsdfVoxel& voxel = (*block)[l];
          voxel.distance = static_cast<float>((voxel.weight * voxel.distance + trunc) / (voxel.weight + 1.0));
          voxel.weight += 1.0f;
        }
      }
}

std::vector<Pose> sample_free_poses(const PrimitiveWorld& world, std::size_t count, double min_clearance,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Aabb& b = world.bounds();
  std::uniform_real_distribution<double> ux(b.min.x(), b.max.x());
  std::uniform_real_distribution<double> uy(b.min.y(), b.max.y());
  std::uniform_real_distribution<double> uz(b.min.z(), b.max.z());
  std::uniform_real_distribution<double> uyaw(0.0, 2.0 * M_PI);
  std::vector<Pose> poses;
  std::size_t attempts = 0;
  while (poses.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw std::runtime_error("could not sample free poses");
    const Point p(ux(rng), uy(rng), uz(rng));
    if (world.exact_distance(p) < min_clearance) continue;
    poses.push_back(camera_pose(p, uyaw(rng)));
  }
  return poses;
}

// ---------------------------------------------------------------------------

EsdfLayer build_esdf(const TsdfLayer& tsdf, const EsdfConfig& config) {
  const double vs = tsdf.voxel_size();
  const double band = config.surface_band_voxels * vs;
  const float max_d = static_cast<float>(config.max_distance);
  EsdfLayer esdf(vs);

  using Entry = std::pair<float, GridIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  for (const GridIndex& b : tsdf.sorted_blocks()) {
    const auto& tblock = *tsdf.find_block(b);
    EsdfLayer::Block* eblock = nullptr;
    for (int l = 0; l < kVoxelsPerBlock; ++l) {
      const TsdfVoxel& t = tblock[l];
      if (t.weight <= 0.0f) continue;
      if (eblock == nullptr) eblock = &esdf.allocate_block(b);
      EsdfVoxel& e = (*eblock)[l];
      e.observed = true;
      e.parent = {};
      if (std::abs(t.distance) < band) {
        e.fixed = true;
        e.distance = t.distance;
        open.emplace(0.0f, from_linear_in_block(b, l));
      } else {
        e.distance = t.distance > 0.0f ? max_d : -max_d;
      }
    }
  }
  // Along-ray distances overstate grazing surfaces, so zero crossings seed too.
  std::vector<GridIndex> crossings;
  esdf.for_each([&](const GridIndex& idx, const EsdfVoxel& e) {
    if (!e.observed || e.fixed) return;
    for (const GridIndex& n : neighbors6(idx)) {
      const EsdfVoxel* nb = esdf.find(n);
      if (nb != nullptr && nb->observed && nb->distance * e.distance < 0.0f) {
        crossings.push_back(idx);
        return;
      }
    }
  });
  for (const GridIndex& idx : crossings) {
    EsdfVoxel& e = *esdf.find(idx);
    e.fixed = true;
    e.distance = tsdf.find(idx)->distance;
    open.emplace(0.0f, idx);
  }
  if (open.empty()) throw NoSurfaceError();

  while (!open.empty()) {
    const auto [key, idx] = open.top();
    open.pop();
    const EsdfVoxel cur = *esdf.find(idx);
    if (!cur.fixed && key > std::abs(cur.distance)) continue;
    const bool cur_positive = cur.distance > 0.0f;
    for (const GridIndex& o : offsets26()) {
      const GridIndex nidx = idx + o;
      EsdfVoxel* nb = esdf.find(nidx);
      if (nb == nullptr || !nb->observed || nb->fixed) continue;
      const bool nb_positive = nb->distance > 0.0f;
      if (!cur.fixed && nb_positive != cur_positive) continue;
      const GridIndex parent = cur.parent - o;
      const float candidate = static_cast<float>(parent.norm() * vs);
      if (candidate > max_d || candidate >= std::abs(nb->distance)) continue;
      nb->distance = nb_positive ? candidate : -candidate;
      nb->parent = parent;
      open.emplace(candidate, nidx);
    }
  }
  return esdf;
}

EsdfLayer build_esdf(const PrimitiveWorld& world, double voxel_size, const EsdfConfig& config) {
  EsdfLayer esdf(voxel_size);
  const auto [lo, hi] = index_range(world.bounds(), voxel_size);
  bool any_surface = false;
  for (int z = lo.z; z <= hi.z; ++z)
    for (int y = lo.y; y <= hi.y; ++y)
      for (int x = lo.x; x <= hi.x; ++x) {
        const GridIndex idx{x, y, z};
        const Point c = index_to_position(idx, voxel_size);
        const double d = world.exact_distance(c);
        const Eigen::Vector3d offset = (world.closest_point(c) - c) / voxel_size;
        EsdfVoxel& v = esdf.at(idx);
        v.observed = true;
        v.parent = {static_cast<int>(std::lround(offset.x())), static_cast<int>(std::lround(offset.y())),
                    static_cast<int>(std::lround(offset.z()))};
        v.fixed = std::isfinite(d) && v.parent.is_zero();
        any_surface = any_surface || v.fixed;
        v.distance = static_cast<float>(std::clamp(d, -config.max_distance, config.max_distance));
      }
  if (!any_surface) throw NoSurfaceError();
  return esdf;
}

// ---------------------------------------------------------------------------

MazeLayout generate_maze_layout(const MazeSpec& spec) {
  if (!(spec.side > 0.0) || !(spec.cell > 0.0)) throw std::invalid_argument("maze side and cell must be positive");
  const int n = std::max(1, static_cast<int>(std::lround(spec.side / spec.cell)));
  MazeLayout layout;
  layout.cells = n;
  layout.east.assign(static_cast<std::size_t>(n) * n, false);
  layout.north.assign(static_cast<std::size_t>(n) * n, false);
  std::vector<bool> visited(static_cast<std::size_t>(n) * n, false);
  std::mt19937_64 rng(spec.seed);
  auto id = [n](int x, int y) { return static_cast<std::size_t>(y) * n + x; };

  std::vector<std::pair<int, int>> stack{{0, 0}};
  visited[0] = true;
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    std::vector<std::pair<int, int>> options;
    if (x + 1 < n && !visited[id(x + 1, y)]) options.emplace_back(x + 1, y);
    if (x > 0 && !visited[id(x - 1, y)]) options.emplace_back(x - 1, y);
    if (y + 1 < n && !visited[id(x, y + 1)]) options.emplace_back(x, y + 1);
    if (y > 0 && !visited[id(x, y - 1)]) options.emplace_back(x, y - 1);
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    const auto [nx, ny] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    if (nx != x) {
      layout.east[id(std::min(x, nx), y)] = true;
    } else {
      layout.north[id(x, std::min(y, ny))] = true;
    }
    visited[id(nx, ny)] = true;
    stack.emplace_back(nx, ny);
  }
  return layout;
}

PrimitiveWorld maze_world(const MazeSpec& spec, const MazeLayout& layout) {
  const int n = layout.cells;
  const double c = spec.cell;
  const double t = spec.wall_thickness;
  const double h = spec.wall_height;
  if (!(t > 0.0) || !(h > 0.0)) throw std::invalid_argument("wall thickness and height must be positive");
  const double extent = n * c;
  const double margin = std::max(t, 0.3);
  Aabb bounds{Point(-margin, -margin, -margin), Point(extent + margin, extent + margin, h + margin)};
  PrimitiveWorld world({}, bounds);
  world.add(PlanePrimitive{PlanePrimitive::Kind::kGround, 0.0});
  world.add(PlanePrimitive{PlanePrimitive::Kind::kCeiling, h});

  // Merges runs of closed unit segments on one grid line into single boxes.
  auto emit_runs = [&](bool along_y, int line, const std::vector<bool>& closed) {
    int start = -1;
    for (int k = 0; k <= n; ++k) {
      const bool is_closed = k < n && closed[k];
      if (is_closed && start < 0) start = k;
      if (!is_closed && start >= 0) {
        const double a = start * c - 0.5 * t;
        const double b = k * c + 0.5 * t;
        const double fixed = line * c;
        Point center, half;
        if (along_y) {
          center = Point(fixed, 0.5 * (a + b), 0.5 * h);
          half = Point(0.5 * t, 0.5 * (b - a), 0.5 * h);
        } else {
          center = Point(0.5 * (a + b), fixed, 0.5 * h);
          half = Point(0.5 * (b - a), 0.5 * t, 0.5 * h);
        }
        world.add(BoxPrimitive{center, half});
        start = -1;
      }
    }
  };

  for (int i = 0; i <= n; ++i) {
    std::vector<bool> closed(n);
    for (int j = 0; j < n; ++j) closed[j] = i == 0 || i == n || !layout.open_east(i - 1, j);
    emit_runs(true, i, closed);
  }
  for (int j = 0; j <= n; ++j) {
    std::vector<bool> closed(n);
    for (int i = 0; i < n; ++i) closed[i] = j == 0 || j == n || !layout.open_north(i, j - 1);
    emit_runs(false, j, closed);
  }
  return world;
}

PrimitiveWorld generate_maze(const MazeSpec& spec) { return maze_world(spec, generate_maze_layout(spec)); }

std::vector<Point> maze_cell_centers(const MazeSpec& spec) {
  const int n = std::max(1, static_cast<int>(std::lround(spec.side / spec.cell)));
  std::vector<Point> out;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out.emplace_back((x + 0.5) * spec.cell, (y + 0.5) * spec.cell, 0.5 * spec.wall_height);
  return out;
}

std::vector<Pose> maze_coverage_poses(const MazeSpec& spec) {
  std::vector<Pose> out;
  for (const Point& p : maze_cell_centers(spec))
    for (int k = 0; k < 4; ++k) out.push_back(camera_pose(p, k * M_PI / 2.0));
  return out;
}

PrimitiveWorld make_sim_world() {
  // 2x2 blocks separated by corridors, inside an outer wall.
  constexpr double kCorridor = 3.0;
  constexpr double kBlock = 3.0;
  constexpr int kBlocks = 2;
  constexpr double kHeight = 3.0;
  constexpr double kWall = 0.3;
  const double side = kBlocks * kBlock + (kBlocks + 1) * kCorridor;
  Aabb bounds{Point(-kWall, -kWall, -kWall), Point(side + kWall, side + kWall, kHeight + kWall)};
  PrimitiveWorld world({}, bounds);
  world.add(PlanePrimitive{PlanePrimitive::Kind::kGround, 0.0});
  world.add(PlanePrimitive{PlanePrimitive::Kind::kCeiling, kHeight});
  const double zc = 0.5 * kHeight;
  const double hz = 0.5 * kHeight;
  world.add(BoxPrimitive{Point(-0.5 * kWall, 0.5 * side, zc), Point(0.5 * kWall, 0.5 * side + kWall, hz)});
  world.add(BoxPrimitive{Point(side + 0.5 * kWall, 0.5 * side, zc), Point(0.5 * kWall, 0.5 * side + kWall, hz)});
  world.add(BoxPrimitive{Point(0.5 * side, -0.5 * kWall, zc), Point(0.5 * side + kWall, 0.5 * kWall, hz)});
  world.add(BoxPrimitive{Point(0.5 * side, side + 0.5 * kWall, zc), Point(0.5 * side + kWall, 0.5 * kWall, hz)});
  for (int i = 0; i < kBlocks; ++i)
    for (int j = 0; j < kBlocks; ++j) {
      const double cx = kCorridor + 0.5 * kBlock + i * (kBlock + kCorridor);
      const double cy = kCorridor + 0.5 * kBlock + j * (kBlock + kCorridor);
      world.add(BoxPrimitive{Point(cx, cy, zc), Point(0.5 * kBlock, 0.5 * kBlock, hz)});
    }
  // Obstacles in the corridors, thick enough to stay solid under a 4-voxel truncation.
  world.add(CylinderPrimitive{Point(0.5 * kCorridor, 0.5 * side, zc), 0.5, kHeight});
  world.add(SpherePrimitive{Point(0.5 * side, 0.5 * kCorridor, zc), 0.5});
  world.add(BoxPrimitive{Point(side - 0.5 * kCorridor, 0.5 * side, 0.4), Point(0.5, 0.5, 0.4)});
  return world;
}

}  // namespace skelplan
