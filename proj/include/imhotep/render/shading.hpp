#pragma once

#include "imhotep/core/geometry.hpp"

#include <span>

namespace imhotep {

struct LightingParams {
  double ka = 0.2;
  double kd = 0.7;
  double ks = 0.3;
  double shininess = 32.0;
  double gradient_epsilon = 0.5;  // HU/mm; below this a sample is ambient-only

  void validate() const;
};

/// ka*base + kd*base*max(n.l, 0) + ks*max(n.h, 0)^shininess with
/// h = normalize(l + v), clamped to [0, 1]. All vectors unit length.
Vec3 shade_blinn_phong(const Vec3& base, const Vec3& n, const Vec3& view_dir, const Vec3& light_dir,
                       const LightingParams& lp);

struct ColorSample {
  Vec3 rgb = Vec3::Zero();
  double alpha = 0.0;
};

/// Front-to-back "over" accumulation with premultiplied output colour.
struct Compositor {
  Vec3 rgb = Vec3::Zero();
  double alpha = 0.0;

  void add(const Vec3& color, double a) {
    const double w = (1.0 - alpha) * a;
    rgb += w * color;
    alpha += w;
  }
};

/// Opacity above which compositing may stop early.
inline constexpr double kEarlyExitAlpha = 0.99;

/// Composites nearest-first samples. With `early_exit` set, stops once the
/// accumulated opacity exceeds kEarlyExitAlpha.
ColorSample composite_front_to_back(std::span<const ColorSample> samples, bool early_exit = true);

}  // namespace imhotep
