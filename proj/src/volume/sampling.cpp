#include "imhotep/volume/sampling.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace imhotep {
namespace {

Vec3 checked_index(const Volume& v, const Vec3& p, double margin) {
  const Vec3 ijk = v.world_to_index(p);
  const Vec3 hi = v.index_extent();
  for (int a = 0; a < 3; ++a) {
    if (!(ijk[a] >= margin - kIndexSlack && ijk[a] <= hi[a] - margin + kIndexSlack)) {
      std::ostringstream msg;
      msg << "sample at (" << p.transpose() << ") mm maps to index (" << ijk.transpose()
          << "), outside the grid";
      fail(ErrorCode::OutOfBounds, msg.str());
    }
  }
  return ijk.cwiseMax(Vec3::Zero()).cwiseMin(hi);
}

}  // namespace

double sample_index(const Volume& v, const Vec3& ijk) {
  int base[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const int n = v.dims[a];
    double f = std::floor(ijk[a]);
    int i = static_cast<int>(f);
    if (i >= n - 1) i = std::max(n - 2, 0);
    if (i < 0) i = 0;
    base[a] = i;
    frac[a] = n > 1 ? ijk[a] - i : 0.0;
  }
  const int sx = v.dims[0] > 1 ? 1 : 0;
  const int sy = v.dims[1] > 1 ? v.dims[0] : 0;
  const std::size_t sz = v.dims[2] > 1 ? static_cast<std::size_t>(v.dims[0]) * v.dims[1] : 0;
  const std::int16_t* p = v.voxels.data() + v.index(base[0], base[1], base[2]);

  const double c000 = p[0], c100 = p[sx];
  const double c010 = p[sy], c110 = p[sy + sx];
  const double c001 = p[sz], c101 = p[sz + sx];
  const double c011 = p[sz + sy], c111 = p[sz + sy + sx];

  const double fx = frac[0], fy = frac[1], fz = frac[2];
  const double c00 = c000 + fx * (c100 - c000);
  const double c10 = c010 + fx * (c110 - c010);
  const double c01 = c001 + fx * (c101 - c001);
  const double c11 = c011 + fx * (c111 - c011);
  const double c0 = c00 + fy * (c10 - c00);
  const double c1 = c01 + fy * (c11 - c01);
  return c0 + fz * (c1 - c0);
}

double sample_trilinear(const Volume& v, const Vec3& p) {
  return sample_index(v, checked_index(v, p, 0.0));
}

GradientSample gradient_central(const Volume& v, const Vec3& p) {
  const Vec3 ijk = checked_index(v, p, 1.0);
  Vec3 local;
  for (int a = 0; a < 3; ++a) {
    Vec3 lo = ijk, hi = ijk;
    lo[a] -= 1.0;
    hi[a] += 1.0;
    local[a] = (sample_index(v, hi) - sample_index(v, lo)) / (2.0 * v.spacing[a]);
  }
  GradientSample out;
  out.g = v.orientation * local;
  out.magnitude = out.g.norm();
  return out;
}

Vec3 gradient_index_clamped(const Volume& v, const Vec3& ijk) {
  const Vec3 hi_bound = v.index_extent();
  Vec3 local;
  for (int a = 0; a < 3; ++a) {
    Vec3 lo = ijk, hi = ijk;
    lo[a] = std::max(ijk[a] - 1.0, 0.0);
    hi[a] = std::min(ijk[a] + 1.0, hi_bound[a]);
    const double dist = hi[a] - lo[a];
    local[a] = dist > 0.0 ? (sample_index(v, hi) - sample_index(v, lo)) / (dist * v.spacing[a])
                          : 0.0;
  }
  return v.orientation * local;
}

}  // namespace imhotep
