#pragma once

#include "imhotep/render/shading.hpp"
#include "imhotep/volume/transfer_function.hpp"
#include "imhotep/volume/volume.hpp"

namespace imhotep {

struct RaymarchOptions {
  bool opacity_correction = true;
  bool early_exit = true;
};

/// Segments shorter than this fraction of `step` at the end of a clipped
/// ray are dropped.
inline constexpr double kMinSegmentFraction = 1e-9;

/// Marches one ray (volume patient space, unit direction) through `v`.
///
/// The ray is clipped to the voxel-centre box and to [0, depth_limit]. The
/// clipped span is cut into segments of length `step` (the last one may be
/// shorter) and each segment is sampled at its midpoint; its opacity is
/// corrected for the segment length. Samples whose gradient magnitude
/// exceeds `lp.gradient_epsilon` are Blinn-Phong shaded with a headlight and
/// n = -normalize(g); others get ambient only. Returns premultiplied colour.
ColorSample raymarch_pixel(const Volume& v, const TransferFunction& tf, const LightingParams& lp,
                           const Ray& ray, double step, double depth_limit,
                           const RaymarchOptions& opts = {});

/// Default sampling distance: half the smallest voxel spacing.
double default_step(const Volume& v);

}  // namespace imhotep
