#pragma once

#include "imhotep/core/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace imhotep {

/// CT volume in Hounsfield units.
///
/// Voxel (i, j, k) sits at world position
///   origin + orientation * (spacing .* (i, j, k))
/// where the orientation columns are the world directions of the i, j and k
/// grid axes. Voxels are stored x-fastest.
struct Volume {
  std::array<int, 3> dims{1, 1, 1};
  Vec3 spacing = Vec3::Ones();
  Vec3 origin = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();
  std::vector<std::int16_t> voxels;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  std::int16_t at(int i, int j, int k) const { return voxels[index(i, j, k)]; }

  Vec3 index_to_world(const Vec3& ijk) const {
    return origin + orientation * spacing.cwiseProduct(ijk);
  }
  Vec3 world_to_index(const Vec3& p) const {
    return (orientation.transpose() * (p - origin)).cwiseQuotient(spacing);
  }
  /// World direction expressed in continuous index units.
  Vec3 direction_to_index(const Vec3& d) const {
    return (orientation.transpose() * d).cwiseQuotient(spacing);
  }

  /// Upper corner of the voxel-center grid in index space.
  Vec3 index_extent() const {
    return Vec3(dims[0] - 1, dims[1] - 1, dims[2] - 1);
  }

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;
};

/// Allocates a volume filled with `fill`, identity orientation.
Volume make_volume(std::array<int, 3> dims, Vec3 spacing, Vec3 origin = Vec3::Zero(),
                   std::int16_t fill = 0);

}  // namespace imhotep
