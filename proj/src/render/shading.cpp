#include "imhotep/render/shading.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace imhotep {

void LightingParams::validate() const {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(ka) || !unit(kd) || !unit(ks)) {
    fail(ErrorCode::InvalidArgument, "lighting coefficients must lie in [0,1]");
  }
  if (!(shininess > 0.0)) fail(ErrorCode::InvalidArgument, "shininess must be > 0");
  if (!(gradient_epsilon >= 0.0)) fail(ErrorCode::InvalidArgument, "gradient_epsilon must be >= 0");
}

Vec3 shade_blinn_phong(const Vec3& base, const Vec3& n, const Vec3& view_dir, const Vec3& light_dir,
                       const LightingParams& lp) {
  const double diffuse = std::max(n.dot(light_dir), 0.0);
  const Vec3 half = light_dir + view_dir;
  const double half_len = half.norm();
  const double spec_dot = half_len > 0.0 ? std::max(n.dot(half) / half_len, 0.0) : 0.0;
  const double specular = spec_dot > 0.0 ? std::pow(spec_dot, lp.shininess) : 0.0;
  Vec3 c = (lp.ka + lp.kd * diffuse) * base + Vec3::Constant(lp.ks * specular);
  return c.cwiseMax(0.0).cwiseMin(1.0);
}

ColorSample composite_front_to_back(std::span<const ColorSample> samples, bool early_exit) {
  Compositor acc;
  for (const auto& s : samples) {
    acc.add(s.rgb, s.alpha);
    if (early_exit && acc.alpha > kEarlyExitAlpha) break;
  }
  return {acc.rgb, acc.alpha};
}

}  // namespace imhotep
