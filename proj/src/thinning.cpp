#include "skelplan/thinning.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <stdexcept>

namespace skelplan {

namespace {

Neighborhood cells(std::initializer_list<GridIndex> offsets) {
  Neighborhood n = 0;
  for (const GridIndex& o : offsets) n |= Neighborhood{1} << cell_bit(o);
  return n;
}

Neighborhood cells_from_json(const nlohmann::json& list) {
  Neighborhood n = 0;
  for (const auto& c : list) {
    const GridIndex o{c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>()};
    if (std::max({std::abs(o.x), std::abs(o.y), std::abs(o.z)}) > 1)
      throw std::invalid_argument("template cell outside the 3x3x3 neighborhood");
    n |= Neighborhood{1} << cell_bit(o);
  }
  return n;
}

nlohmann::json cells_to_json(Neighborhood n) {
  nlohmann::json out = nlohmann::json::array();
  for (int bit = 0; bit < 27; ++bit) {
    if (((n >> bit) & 1u) == 0) continue;
    const GridIndex o = cell_offset(bit);
    out.push_back({o.x, o.y, o.z});
  }
  return out;
}

std::vector<VoxelTemplate> templates_from_json(const nlohmann::json& list) {
  std::vector<VoxelTemplate> out;
  for (const auto& t : list) {
    VoxelTemplate tpl{cells_from_json(t.at("foreground")), cells_from_json(t.at("background"))};
    tpl.validate();
    out.push_back(tpl);
  }
  return out;
}

}  // namespace

void VoxelTemplate::validate() const {
  if ((foreground & background) != 0) throw std::invalid_argument("template foreground and background overlap");
  if ((foreground & kCenterMask) == 0) throw std::invalid_argument("template center must be foreground");
}

const std::vector<Eigen::Matrix3i>& cube_symmetries() {
  static const std::vector<Eigen::Matrix3i> all = [] {
    std::vector<Eigen::Matrix3i> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
      for (int signs = 0; signs < 8; ++signs) {
        Eigen::Matrix3i m = Eigen::Matrix3i::Zero();
        for (int r = 0; r < 3; ++r) m(r, perm[r]) = (signs >> r) & 1 ? -1 : 1;
        out.push_back(m);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return all;
}

Neighborhood transform_neighborhood(Neighborhood n, const Eigen::Matrix3i& m) {
  Neighborhood out = 0;
  while (n != 0) {
    const int bit = std::countr_zero(n);
    n &= n - 1;
    const GridIndex o = cell_offset(bit);
    const Eigen::Vector3i t = m * Eigen::Vector3i(o.x, o.y, o.z);
    out |= Neighborhood{1} << cell_bit(t.x(), t.y(), t.z());
  }
  return out;
}

VoxelTemplate transform_template(const VoxelTemplate& t, const Eigen::Matrix3i& m) {
  return {transform_neighborhood(t.foreground, m), transform_neighborhood(t.background, m)};
}

TemplateSet::TemplateSet(std::vector<VoxelTemplate> templates) : templates_(std::move(templates)) {
  std::sort(templates_.begin(), templates_.end());
  templates_.erase(std::unique(templates_.begin(), templates_.end()), templates_.end());
}

void TemplateSet::add_with_symmetries(const VoxelTemplate& base) {
  base.validate();
  for (const auto& m : cube_symmetries()) templates_.push_back(transform_template(base, m));
  std::sort(templates_.begin(), templates_.end());
  templates_.erase(std::unique(templates_.begin(), templates_.end()), templates_.end());
}

bool TemplateSet::matches(Neighborhood n) const {
  return std::any_of(templates_.begin(), templates_.end(), [n](const VoxelTemplate& t) { return t.matches(n); });
}

TemplateSet expand_symmetries(const VoxelTemplate& base) {
  TemplateSet set;
  set.add_with_symmetries(base);
  return set;
}

ThinningTemplates make_thinning_templates(std::vector<VoxelTemplate> deletion_base,
                                          std::vector<VoxelTemplate> corner_base) {
  ThinningTemplates t;
  t.deletion_base = std::move(deletion_base);
  t.corner_base = std::move(corner_base);
  for (const auto& b : t.deletion_base) t.deletion.add_with_symmetries(b);
  for (const auto& b : t.corner_base) t.corner.add_with_symmetries(b);
  return t;
}

const ThinningTemplates& default_thinning_templates() {
  static const ThinningTemplates t = [] {
    const Neighborhood c = kCenterMask;
    std::vector<VoxelTemplate> deletion{
        {c | cells({{1, 0, 0}}), cells({{-1, 0, 0}})},
        {c | cells({{1, 1, 0}}), cells({{-1, 0, 0}})},
        {c | cells({{1, 1, 1}}), cells({{-1, 0, 0}})},
        {c | cells({{0, 1, 0}}), cells({{-1, 0, 0}, {1, 0, 0}})},
    };
    std::vector<VoxelTemplate> corner{
        {c | cells({{1, 0, 0}, {1, 1, 0}}),
         cells({{-1, -1, -1}, {-1, 0, -1}, {-1, 1, -1}, {-1, -1, 0}, {-1, 0, 0}, {-1, 1, 0}, {-1, -1, 1}, {-1, 0, 1},
                {-1, 1, 1}, {0, 1, 0}})},
    };
    return make_thinning_templates(std::move(deletion), std::move(corner));
  }();
  return t;
}

ThinningTemplates thinning_templates_from_json(const nlohmann::json& j) {
  return make_thinning_templates(templates_from_json(j.at("deletion")), templates_from_json(j.at("corner")));
}

nlohmann::json thinning_templates_to_json(const ThinningTemplates& t) {
  auto dump = [](const std::vector<VoxelTemplate>& list) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& tpl : list)
      out.push_back({{"foreground", cells_to_json(tpl.foreground)}, {"background", cells_to_json(tpl.background)}});
    return out;
  };
  return {{"deletion", dump(t.deletion_base)}, {"corner", dump(t.corner_base)}};
}

ThinningTemplates load_thinning_templates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return thinning_templates_from_json(nlohmann::json::parse(in));
}

bool is_simple(Neighborhood n) {
  const Neighborhood foreground = n & kFullMask & ~kCenterMask;
  if (connected_components(foreground, Connectivity::k26) != 1) return false;
  const Neighborhood background = ~n & kFullMask & ~kCenterMask;
  return connected_components(background, Connectivity::k6) == 1;
}

bool is_end_point(Neighborhood n, const TemplateSet& corner) {
  const Neighborhood foreground = n & kFullMask & ~kCenterMask;
  if (std::popcount(foreground) == 1) return true;
  return std::popcount(foreground & kFaceMask) <= 1 && corner.matches(n | kCenterMask);
}

bool is_end_point(Neighborhood n) { return std::popcount(n & kFullMask & ~kCenterMask) == 1; }

bool is_deletable(Neighborhood n, const ThinningTemplates& templates, bool use_corner_template) {
  n |= kCenterMask;
  if (!templates.deletion.matches(n)) return false;
  if (!is_simple(n)) return false;
  return use_corner_template ? !is_end_point(n, templates.corner) : !is_end_point(n);
}

Neighborhood diagram_neighborhood(const SkeletonLayer& skeleton, const GridIndex& center) {
  return read_neighborhood(skeleton, center, [](const SkeletonVoxel& v) { return v.on_diagram(); });
}

ThinningStats thin(SkeletonLayer& skeleton, const ThinningTemplates& templates, const ThinningOptions& options) {
  ThinningStats stats;
  for (; stats.passes < options.max_passes;) {
    ++stats.passes;
    std::vector<GridIndex> candidates;
    skeleton.for_each([&](const GridIndex& idx, const SkeletonVoxel& v) {
      if (!v.is_edge || v.is_vertex) return;
      if (templates.deletion.matches(diagram_neighborhood(skeleton, idx))) candidates.push_back(idx);
    });
    std::size_t deleted = 0;
    for (const GridIndex& idx : candidates) {
      if (is_deletable(diagram_neighborhood(skeleton, idx), templates, options.use_corner_template)) {
        skeleton.find(idx)->is_edge = false;
        ++deleted;
      }
    }
    stats.deleted += deleted;
    if (deleted == 0) break;
  }
  skeleton.for_each([&](const GridIndex&, const SkeletonVoxel& v) {
    if (v.is_edge) ++stats.remaining;
  });
  return stats;
}

}  // namespace skelplan
