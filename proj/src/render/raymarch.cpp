#include "imhotep/render/raymarch.hpp"

#include "imhotep/core/error.hpp"
#include "imhotep/volume/opacity.hpp"
#include "imhotep/volume/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace imhotep {

double default_step(const Volume& v) { return 0.5 * v.spacing.minCoeff(); }

ColorSample raymarch_pixel(const Volume& v, const TransferFunction& tf, const LightingParams& lp,
                           const Ray& ray, double step, double depth_limit,
                           const RaymarchOptions& opts) {
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "ray-march step must be > 0");

  // March in continuous index space; t stays in world millimetres because
  // the index ray is the affine image of the world ray.
  const Ray index_ray{v.world_to_index(ray.origin), v.direction_to_index(ray.dir)};
  Aabb box;
  box.lo = Vec3::Zero();
  box.hi = v.index_extent();
  double t0 = 0.0, t1 = 0.0;
  if (!intersect_aabb(index_ray, box, t0, t1)) return {};
  const double t_entry = std::max(t0, 0.0);
  const double t_exit = std::min(t1, depth_limit);
  if (!(t_exit > t_entry)) return {};

  const Vec3 view_dir = -ray.dir;
  const Vec3 hi = box.hi;
  Compositor acc;
  for (long k = 0;; ++k) {
    const double seg_start = t_entry + static_cast<double>(k) * step;
    const double remaining = t_exit - seg_start;
    if (remaining <= kMinSegmentFraction * step) break;
    const double seg = std::min(step, remaining);
    const double t = seg_start + 0.5 * seg;

    const Vec3 ijk = (index_ray.origin + t * index_ray.dir).cwiseMax(Vec3::Zero()).cwiseMin(hi);
    const Vec4 rgba = tf_eval(tf, sample_index(v, ijk));
    if (rgba[3] <= 0.0) continue;
    const double alpha =
        opts.opacity_correction ? opacity_correct(rgba[3], seg, tf.reference_step) : rgba[3];

    const Vec3 base = rgba.head<3>();
    const Vec3 g = gradient_index_clamped(v, ijk);
    const double mag = g.norm();
    const Vec3 color =
        mag > lp.gradient_epsilon ? shade_blinn_phong(base, -g / mag, view_dir, view_dir, lp)
                                  : Vec3(lp.ka * base);
    acc.add(color, alpha);
    if (opts.early_exit && acc.alpha > kEarlyExitAlpha) break;
  }
  return {acc.rgb, acc.alpha};
}

}  // namespace imhotep
