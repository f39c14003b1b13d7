#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skelplan/medial_axis.hpp"
#include "skelplan/sparse_graph.hpp"
#include "skelplan/thinning.hpp"
#include "skelplan/world_sim.hpp"

namespace skelplan {

struct PipelineConfig {
  double voxel_size = 0.1;
  DepthCamera camera;  // camera.noise_sigma is the depth noise
  std::size_t num_poses = 200;
  double pose_clearance = 0.5;
  std::uint64_t seed = 1;
  /// Exact distances from the primitives instead of simulated scans.
  bool ground_truth = false;
  TsdfConfig tsdf;
  EsdfConfig esdf;
  MedialAxisConfig medial;
  ThinningOptions thinning;
  GraphConfig graph;
  /// Thinning template file; empty selects the built-in set.
  std::string templates_path;

  void validate() const;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineOutput {
  EsdfLayer esdf;
  SkeletonLayer skeleton;
  SparseGraph graph;
  std::vector<StageTiming> timings;
  std::size_t gvd_voxels = 0;
  std::size_t diagram_voxels = 0;
};

/// Wraps an exception raised inside a pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Simulated scans fused into a TSDF and converted to an ESDF, or the exact
/// ESDF when config.ground_truth is set. Poses default to sample_free_poses.
EsdfLayer map_world(const PrimitiveWorld& world, const PipelineConfig& config,
                    const std::vector<Pose>& poses = {});

/// GVD, thinning and sparse graph from an existing ESDF.
PipelineOutput build_from_esdf(EsdfLayer esdf, const PipelineConfig& config);
PipelineOutput build_from_world(const PrimitiveWorld& world, const PipelineConfig& config,
                                const std::vector<Pose>& poses = {});

std::size_t count_diagram_voxels(const SkeletonLayer& skeleton);

/// ASCII PLY point cloud of the diagram voxels with their clearance.
void export_skeleton_ply(const std::string& path, const SkeletonLayer& skeleton);
/// ASCII PLY polyline.
void export_path_ply(const std::string& path, const std::vector<Point>& waypoints);

void write_timings_csv(const std::string& path, const std::vector<StageTiming>& timings);

}  // namespace skelplan
