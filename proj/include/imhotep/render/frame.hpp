#pragma once

#include "imhotep/render/camera.hpp"
#include "imhotep/render/framebuffer.hpp"
#include "imhotep/render/rasterizer.hpp"
#include "imhotep/render/raymarch.hpp"

#include <memory>
#include <vector>

namespace imhotep {

/// Immutable description of what one frame shows.
struct RenderScene {
  std::vector<MeshInstance> meshes;
  std::shared_ptr<const Volume> volume;
  Affine3 volume_model = Affine3::Identity();  // patient mm -> world
  TransferFunction transfer_function;
  LightingParams lighting;
};

struct RenderOptions {
  int workers = 0;    // 0: hardware concurrency
  double step = 0.0;  // mm in volume space; <= 0 selects default_step()
  RaymarchOptions raymarch;
};

/// One eye: opaque meshes, then the volume ray-marched up to the opaque
/// depth and composited over it, then translucent meshes blended on top.
Framebuffer render_view(const RenderScene& scene, const Camera& cam, const RenderOptions& opts = {});

struct StereoFrame {
  Framebuffer left;
  Framebuffer right;
};

/// Renders both eyes of `rig` (parallel axes, +/- ipd/2 along right).
StereoFrame render_frame(const RenderScene& scene, const StereoRig& rig,
                         const RenderOptions& opts = {});

}  // namespace imhotep
