#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "skelplan/voxel_core.hpp"

namespace skelplan {

/// 3x3x3 pattern: `foreground` cells must be set, `background` cells must be
/// clear, everything else is don't-care. The center is always foreground.
struct VoxelTemplate {
  Neighborhood foreground = kCenterMask;
  Neighborhood background = 0;

  bool matches(Neighborhood n) const { return (n & foreground) == foreground && (n & background) == 0; }
  void validate() const;
  auto operator<=>(const VoxelTemplate&) const = default;
};

/// The 48 axis permutations with sign flips (rotations and mirrors) as 3x3
/// integer matrices.
const std::vector<Eigen::Matrix3i>& cube_symmetries();

Neighborhood transform_neighborhood(Neighborhood n, const Eigen::Matrix3i& m);
VoxelTemplate transform_template(const VoxelTemplate& t, const Eigen::Matrix3i& m);

class TemplateSet {
 public:
  TemplateSet() = default;
  explicit TemplateSet(std::vector<VoxelTemplate> templates);

  /// Adds every distinct symmetric image of `base`.
  void add_with_symmetries(const VoxelTemplate& base);
  bool matches(Neighborhood n) const;
  const std::vector<VoxelTemplate>& templates() const { return templates_; }
  std::size_t size() const { return templates_.size(); }

 private:
  std::vector<VoxelTemplate> templates_;
};

/// All distinct images of `base` under cube_symmetries().
TemplateSet expand_symmetries(const VoxelTemplate& base);

struct ThinningTemplates {
  std::vector<VoxelTemplate> deletion_base;
  std::vector<VoxelTemplate> corner_base;
  TemplateSet deletion;
  TemplateSet corner;
};

/// Builds the expanded sets from base templates.
ThinningTemplates make_thinning_templates(std::vector<VoxelTemplate> deletion_base,
                                          std::vector<VoxelTemplate> corner_base);
/// The shipped templates (identical to data/thinning_templates.json).
const ThinningTemplates& default_thinning_templates();
ThinningTemplates thinning_templates_from_json(const nlohmann::json& j);
nlohmann::json thinning_templates_to_json(const ThinningTemplates& t);
ThinningTemplates load_thinning_templates(const std::string& path);

/// Removing the center preserves topology: one 26-connected foreground
/// component in the 26-neighborhood and one 6-connected background component
/// in the 18-neighborhood that touches a face of the center.
bool is_simple(Neighborhood n);

/// Exactly one 26-connected foreground neighbor, or at most one 6-connected
/// foreground neighbor together with a corner-template match.
bool is_end_point(Neighborhood n, const TemplateSet& corner);
bool is_end_point(Neighborhood n);

struct ThinningOptions {
  bool use_corner_template = true;
  int max_passes = 1000;
};

struct ThinningStats {
  int passes = 0;
  std::size_t deleted = 0;
  std::size_t remaining = 0;
};

/// True if the voxel may be removed: matches a deletion template, is simple
/// and is not an end point.
bool is_deletable(Neighborhood n, const ThinningTemplates& templates, bool use_corner_template);

/// Repeatedly deletes deletable edge voxels until none remain. Candidates are
/// collected per pass and re-validated one by one in lexicographic order.
ThinningStats thin(SkeletonLayer& skeleton, const ThinningTemplates& templates = default_thinning_templates(),
                   const ThinningOptions& options = {});

/// Foreground neighborhood (is_edge or is_vertex) of a skeleton voxel.
Neighborhood diagram_neighborhood(const SkeletonLayer& skeleton, const GridIndex& center);

}  // namespace skelplan
