#include "skelplan/pipeline.hpp"

#include <chrono>
#include <fstream>

namespace skelplan {

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
auto timed(const std::string& stage, std::vector<StageTiming>& timings, F&& fn) {
  const auto t0 = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      timings.push_back({stage, std::chrono::duration<double>(Clock::now() - t0).count()});
    } else {
      auto out = fn();
      timings.push_back({stage, std::chrono::duration<double>(Clock::now() - t0).count()});
      return out;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be positive");
  if (!ground_truth) {
    camera.validate();
    if (num_poses == 0) throw std::invalid_argument("num_poses must be positive");
  }
  medial.validate();
  graph.validate();
}

EsdfLayer map_world(const PrimitiveWorld& world, const PipelineConfig& config, const std::vector<Pose>& poses) {
  config.validate();
  if (config.ground_truth) return build_esdf(world, config.voxel_size, config.esdf);
  const std::vector<Pose> views =
      poses.empty() ? sample_free_poses(world, config.num_poses, config.pose_clearance, config.seed) : poses;
  TsdfLayer tsdf(config.voxel_size);
  for (std::size_t i = 0; i < views.size(); ++i) {
    const DepthImage image = render_depth(world, views[i], config.camera, config.seed * 1000003u + i);
    integrate_tsdf(tsdf, image, views[i], config.camera, world.bounds(), config.tsdf);
  }
  return build_esdf(tsdf, config.esdf);
}

PipelineOutput build_from_esdf(EsdfLayer esdf, const PipelineConfig& config) {
  config.validate();
  std::vector<StageTiming> timings;
  SkeletonLayer skeleton = timed("gvd", timings, [&] {
    SkeletonLayer s = extract_gvd(esdf, config.medial);
    classify_edges(s, config.medial.min_edge_neighbors);
    fill_edge_cavities(s, esdf, config.medial.min_gvd_distance);
    return s;
  });
  std::size_t gvd_voxels = 0;
  skeleton.for_each([&](const GridIndex&, const SkeletonVoxel& v) {
    if (v.on_medial_axis) ++gvd_voxels;
  });
  timed("thinning", timings, [&] {
    const ThinningTemplates templates = config.templates_path.empty()
                                            ? default_thinning_templates()
                                            : load_thinning_templates(config.templates_path);
    thin(skeleton, templates, config.thinning);
  });
  const std::size_t diagram_voxels = count_diagram_voxels(skeleton);

  GraphBuildTimings graph_timings;
  SparseGraph graph = timed("graph", timings, [&] {
    return build_sparse_graph(skeleton, esdf, config.graph, &graph_timings);
  });
  timings.pop_back();
  timings.push_back({"vertices", graph_timings.vertices_s});
  timings.push_back({"edges", graph_timings.edges_s});
  timings.push_back({"splitting", graph_timings.splitting_s});
  timings.push_back({"repair", graph_timings.repair_s});
  return {std::move(esdf), std::move(skeleton), std::move(graph), std::move(timings), gvd_voxels, diagram_voxels};
}

PipelineOutput build_from_world(const PrimitiveWorld& world, const PipelineConfig& config,
                                const std::vector<Pose>& poses) {
  std::vector<StageTiming> timings;
  EsdfLayer esdf = timed("esdf", timings, [&] { return map_world(world, config, poses); });
  PipelineOutput out = build_from_esdf(std::move(esdf), config);
  out.timings.insert(out.timings.begin(), timings.begin(), timings.end());
  return out;
}

std::size_t count_diagram_voxels(const SkeletonLayer& skeleton) {
  std::size_t n = 0;
  skeleton.for_each([&](const GridIndex&, const SkeletonVoxel& v) {
    if (v.on_diagram()) ++n;
  });
  return n;
}

void export_skeleton_ply(const std::string& path, const SkeletonLayer& skeleton) {
  std::vector<std::pair<Point, float>> points;
  skeleton.for_each([&](const GridIndex& idx, const SkeletonVoxel& v) {
    if (v.on_diagram()) points.push_back({skeleton.center(idx), v.distance});
  });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nproperty float distance\nend_header\n";
  for (const auto& [p, d] : points) out << p.x() << ' ' << p.y() << ' ' << p.z() << ' ' << d << '\n';
}

void export_path_ply(const std::string& path, const std::vector<Point>& waypoints) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::size_t edges = waypoints.empty() ? 0 : waypoints.size() - 1;
  out << "ply\nformat ascii 1.0\nelement vertex " << waypoints.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nelement edge " << edges
      << "\nproperty int vertex1\nproperty int vertex2\nend_header\n";
  for (const Point& p : waypoints) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (std::size_t i = 0; i < edges; ++i) out << i << ' ' << i + 1 << '\n';
}

void write_timings_csv(const std::string& path, const std::vector<StageTiming>& timings) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "stage,seconds\n";
  for (const auto& t : timings) out << t.stage << ',' << t.seconds << '\n';
}

}  // namespace skelplan
