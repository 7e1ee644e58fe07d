#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace imhotep {

inline constexpr double kDepthInfinity = std::numeric_limits<double>::infinity();

using Rgba = std::array<double, 4>;

/// Render target. `radiance` holds premultiplied RGBA before quantisation;
/// `color` is the straight-alpha RGBA8 image derived from it, row-major from
/// the top row. `depth` is the camera-space distance (along the view axis)
/// to the nearest opaque surface, or kDepthInfinity.
struct Framebuffer {
  int width = 0;
  int height = 0;
  std::vector<Rgba> radiance;
  std::vector<std::uint8_t> color;
  std::vector<double> depth;

  Framebuffer() = default;
  Framebuffer(int w, int h);

  std::size_t pixel(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }

  /// Rebuilds `color` from `radiance` (un-premultiplied, rounded).
  void quantize();
  void quantize_rows(int y0, int y1);
};

}  // namespace imhotep
