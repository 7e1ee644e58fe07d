#include "imhotep/volume/volume.hpp"

#include "imhotep/core/error.hpp"

#include <cmath>
#include <string>

namespace imhotep {

void Volume::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1) fail(ErrorCode::InvalidArgument, "volume dimension < 1");
    if (!(spacing[a] > 0.0)) fail(ErrorCode::InvalidArgument, "volume spacing must be > 0");
  }
  for (int c = 0; c < 3; ++c) {
    if (std::abs(orientation.col(c).norm() - 1.0) > 1e-6) {
      fail(ErrorCode::InvalidArgument,
           "orientation column " + std::to_string(c) + " is not unit length");
    }
    for (int d = c + 1; d < 3; ++d) {
      if (std::abs(orientation.col(c).dot(orientation.col(d))) >= 1e-6) {
        fail(ErrorCode::InvalidArgument, "orientation columns are not orthogonal");
      }
    }
  }
  if (voxels.size() != voxel_count()) {
    fail(ErrorCode::InvalidArgument, "voxel buffer length does not match dimensions");
  }
}

Volume make_volume(std::array<int, 3> dims, Vec3 spacing, Vec3 origin, std::int16_t fill) {
  Volume v;
  v.dims = dims;
  v.spacing = spacing;
  v.origin = origin;
  v.voxels.assign(v.voxel_count(), fill);
  v.validate();
  return v;
}

}  // namespace imhotep
