#pragma once

#include "imhotep/render/camera.hpp"
#include "imhotep/scene/annotation.hpp"

#include <span>
#include <vector>

namespace imhotep {

/// Axis-aligned label rectangle in pixels; `visible` is false when the label
/// point is behind the camera's near plane.
struct LabelRect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool visible = true;
};

/// True when the open interiors intersect (shared edges do not count).
bool rects_overlap(const LabelRect& a, const LabelRect& b);

struct LabelPlacementParams {
  double workspace_size = 2.0;  // m
  Affine3 model = Affine3::Identity();  // patient mm -> world mm
  double base_fraction = 0.075;
  double increment_fraction = 0.025;
  int max_passes = 100;
};

struct LabelLayout {
  std::vector<double> distances;  // m, one per annotation
  std::vector<LabelRect> rects;
  int passes = 0;
  bool overflow = false;  // pass cap reached with overlaps remaining
};

/// Hedgehog placement: each label sits at anchor + distance * normal and
/// starts at base_fraction * workspace_size. Each pass finds every
/// overlapping pair of label rectangles and pushes the higher-id member of
/// each pair out by increment_fraction * workspace_size (once per pass).
LabelLayout place_labels(std::span<const Annotation> annotations, const Camera& cam,
                         std::span<const Vec2> sizes, const LabelPlacementParams& params = {});

/// Label point in world mm for a given push-out distance in metres.
Vec3 label_position(const Annotation& a, double distance_m, const Affine3& model);

/// Default pixel size of a text label.
Vec2 default_label_size(const std::string& text);

}  // namespace imhotep
