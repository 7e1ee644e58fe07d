#include "imhotep/render/frame.hpp"

#include "imhotep/core/error.hpp"
#include "imhotep/render/parallel.hpp"

namespace imhotep {

Framebuffer render_view(const RenderScene& scene, const Camera& cam, const RenderOptions& opts) {
  const PreparedMeshes prepared(scene.meshes, cam);
  Framebuffer fb(cam.width, cam.height);

  const Volume* volume = scene.volume.get();
  Affine3 to_patient = Affine3::Identity();
  double step = opts.step;
  if (volume) {
    if (std::abs(scene.volume_model.linear().determinant()) < 1e-12) {
      fail(ErrorCode::DegenerateTransform, "volume transform is not invertible");
    }
    to_patient = scene.volume_model.inverse();
    if (!(step > 0.0)) step = default_step(*volume);
  }

  parallel_rows(cam.height, opts.workers, [&](int y0, int y1) {
    rasterize_opaque_rows(prepared, scene.lighting, fb, y0, y1);
    if (volume) {
      for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < cam.width; ++x) {
          const std::size_t p = fb.pixel(x, y);
          const Ray world = cam.pixel_ray(x, y);
          // Opaque depth is measured along the view axis; convert to ray t.
          const double t_limit = fb.depth[p] == kDepthInfinity
                                     ? kDepthInfinity
                                     : fb.depth[p] / world.dir.dot(cam.forward);
          Ray local{to_patient * world.origin, to_patient.linear() * world.dir};
          const double scale = local.dir.norm();
          local.dir /= scale;
          const ColorSample s = raymarch_pixel(*volume, scene.transfer_function, scene.lighting,
                                               local, step, t_limit * scale, opts.raymarch);
          if (s.alpha <= 0.0) continue;
          Rgba& dst = fb.radiance[p];
          const double rest = 1.0 - s.alpha;
          dst = {s.rgb.x() + rest * dst[0], s.rgb.y() + rest * dst[1], s.rgb.z() + rest * dst[2],
                 s.alpha + rest * dst[3]};
        }
      }
    }
    blend_translucent_rows(prepared, scene.lighting, fb, y0, y1);
    fb.quantize_rows(y0, y1);
  });
  return fb;
}

StereoFrame render_frame(const RenderScene& scene, const StereoRig& rig, const RenderOptions& opts) {
  if (!(rig.ipd >= 0.0)) fail(ErrorCode::InvalidArgument, "ipd must be >= 0");
  return {render_view(scene, rig.eye_camera(1), opts), render_view(scene, rig.eye_camera(2), opts)};
}

}  // namespace imhotep
