#include "imhotep/render/framebuffer.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace imhotep {
namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Framebuffer::Framebuffer(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) fail(ErrorCode::InvalidArgument, "framebuffer size must be positive");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  radiance.assign(n, Rgba{0.0, 0.0, 0.0, 0.0});
  color.assign(4 * n, 0);
  depth.assign(n, kDepthInfinity);
}

void Framebuffer::quantize() { quantize_rows(0, height); }

void Framebuffer::quantize_rows(int y0, int y1) {
  for (std::size_t i = static_cast<std::size_t>(y0) * width; i < static_cast<std::size_t>(y1) * width; ++i) {
    const Rgba& c = radiance[i];
    const double a = c[3];
    std::uint8_t* out = &color[4 * i];
    if (a > 0.0) {
      out[0] = to_byte(c[0] / a);
      out[1] = to_byte(c[1] / a);
      out[2] = to_byte(c[2] / a);
    } else {
      out[0] = out[1] = out[2] = 0;
    }
    out[3] = to_byte(a);
  }
}

}  // namespace imhotep
