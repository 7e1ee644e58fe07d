#include "imhotep/scene/labels.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>
#include <numeric>

namespace imhotep {

bool rects_overlap(const LabelRect& a, const LabelRect& b) {
  if (!a.visible || !b.visible) return false;
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

Vec3 label_position(const Annotation& a, double distance_m, const Affine3& model) {
  const Vec3 normal = (model.linear().inverse().transpose() * a.normal).normalized();
  return model * a.anchor + (distance_m * 1000.0) * normal;
}

Vec2 default_label_size(const std::string& text) {
  return Vec2(12.0 + 8.0 * static_cast<double>(std::min<std::size_t>(text.size(), 48)), 20.0);
}

LabelLayout place_labels(std::span<const Annotation> annotations, const Camera& cam,
                         std::span<const Vec2> sizes, const LabelPlacementParams& params) {
  if (sizes.size() != annotations.size()) {
    fail(ErrorCode::InvalidArgument, "place_labels needs one label size per annotation");
  }
  for (const auto& a : annotations) a.validate();

  const std::size_t n = annotations.size();
  LabelLayout layout;
  layout.distances.assign(n, params.base_fraction * params.workspace_size);
  layout.rects.resize(n);
  const double increment = params.increment_fraction * params.workspace_size;

  auto project_all = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 p = cam.project(label_position(annotations[i], layout.distances[i], params.model));
      LabelRect& r = layout.rects[i];
      r.visible = p.z() >= cam.near_plane;
      r.x0 = p.x() - 0.5 * sizes[i].x();
      r.x1 = p.x() + 0.5 * sizes[i].x();
      r.y0 = p.y() - 0.5 * sizes[i].y();
      r.y1 = p.y() + 0.5 * sizes[i].y();
    }
  };

  project_all();
  for (;;) {
    std::vector<char> push(n, 0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!rects_overlap(layout.rects[i], layout.rects[j])) continue;
        any = true;
        push[annotations[i].id > annotations[j].id ? i : j] = 1;
      }
    }
    if (!any) break;
    if (layout.passes == params.max_passes) {
      layout.overflow = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (push[i]) layout.distances[i] += increment;
    }
    ++layout.passes;
    project_all();
  }
  return layout;
}

}  // namespace imhotep
