#pragma once

#include "imhotep/volume/volume.hpp"

namespace imhotep {

struct GradientSample {
  Vec3 g = Vec3::Zero();  // HU/mm, world space
  double magnitude = 0.0;
};

/// Points within this distance (in voxel units) outside the centre grid are
/// treated as lying on its boundary; anything further is OutOfBounds.
inline constexpr double kIndexSlack = 1e-7;

/// Trilinear reconstruction at world point `p` (mm). Throws OutOfBounds
/// when `p` lies outside the voxel-centre grid.
double sample_trilinear(const Volume& v, const Vec3& p);

/// Central differences of trilinear samples at +/- one voxel along each grid
/// axis, rotated into world space. `p` must be at least one voxel inside.
GradientSample gradient_central(const Volume& v, const Vec3& p);

/// Trilinear sample at a continuous index position. The caller guarantees
/// that `ijk` lies inside [0, n-1] on every axis.
double sample_index(const Volume& v, const Vec3& ijk);

/// Gradient at a continuous index position for use along rendered rays.
/// Interior points give exactly `gradient_central`; near the boundary the
/// +/- sample positions are clamped into the grid and the difference is
/// divided by the clamped distance.
Vec3 gradient_index_clamped(const Volume& v, const Vec3& ijk);

}  // namespace imhotep
