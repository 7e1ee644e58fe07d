#include "imhotep/patient/series.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace imhotep {
namespace {

constexpr double kGeometryTolerance = 1e-6;

std::int16_t to_hounsfield(double value) {
  const double r = std::round(value);  // half away from zero
  constexpr double lo = std::numeric_limits<std::int16_t>::min();
  constexpr double hi = std::numeric_limits<std::int16_t>::max();
  return static_cast<std::int16_t>(std::clamp(r, lo, hi));
}

}  // namespace

Volume assemble_series(std::span<const DicomDataset> datasets) {
  if (datasets.size() < 2) {
    fail(ErrorCode::SingleSlice, "a series needs at least 2 slices, got " +
                                     std::to_string(datasets.size()));
  }

  std::vector<SliceGeometry> geoms;
  geoms.reserve(datasets.size());
  for (const auto& ds : datasets) geoms.push_back(slice_geometry(ds));

  const SliceGeometry& ref = geoms.front();
  for (const auto& g : geoms) {
    const bool same = g.rows == ref.rows && g.columns == ref.columns &&
                      (g.pixel_spacing - ref.pixel_spacing).cwiseAbs().maxCoeff() <= kGeometryTolerance &&
                      (g.row_direction - ref.row_direction).cwiseAbs().maxCoeff() <= kGeometryTolerance &&
                      (g.column_direction - ref.column_direction).cwiseAbs().maxCoeff() <= kGeometryTolerance;
    if (!same) {
      fail(ErrorCode::InconsistentGeometry,
           "slices disagree on Rows/Columns/PixelSpacing/ImageOrientationPatient");
    }
  }

  const double row_len = ref.row_direction.norm();
  const double col_len = ref.column_direction.norm();
  if (std::abs(row_len - 1.0) > kGeometryTolerance || std::abs(col_len - 1.0) > kGeometryTolerance) {
    fail(ErrorCode::InconsistentGeometry, "ImageOrientationPatient vectors are not unit length");
  }
  const Vec3 row_dir = ref.row_direction / row_len;
  const Vec3 col_dir = ref.column_direction / col_len;
  if (std::abs(row_dir.dot(col_dir)) >= kGeometryTolerance) {
    fail(ErrorCode::InconsistentGeometry, "ImageOrientationPatient vectors are not orthogonal");
  }
  const Vec3 normal = row_dir.cross(col_dir).normalized();

  std::vector<std::size_t> order(datasets.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> along(datasets.size());
  for (std::size_t i = 0; i < geoms.size(); ++i) along[i] = geoms[i].position.dot(normal);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return along[a] < along[b]; });

  const std::size_t n = order.size();
  const double span = along[order.back()] - along[order.front()];
  const double mean_gap = span / static_cast<double>(n - 1);
  if (!(mean_gap > 0.0)) {
    fail(ErrorCode::NonUniformSpacing, "slices share the same position");
  }
  for (std::size_t s = 1; s < n; ++s) {
    const double gap = along[order[s]] - along[order[s - 1]];
    if (std::abs(gap - mean_gap) > kSliceGapTolerance * mean_gap) {
      fail(ErrorCode::NonUniformSpacing,
           "slice gap " + std::to_string(gap) + " mm deviates from mean " +
               std::to_string(mean_gap) + " mm by more than 1%");
    }
  }

  Volume vol;
  vol.dims = {ref.columns, ref.rows, static_cast<int>(n)};
  // PixelSpacing is (between rows, between columns): x follows columns.
  vol.spacing = Vec3(ref.pixel_spacing[1], ref.pixel_spacing[0], mean_gap);
  vol.origin = geoms[order.front()].position;
  vol.orientation.col(0) = row_dir;
  vol.orientation.col(1) = col_dir;
  vol.orientation.col(2) = normal;
  vol.voxels.resize(vol.voxel_count());

  const std::size_t plane = static_cast<std::size_t>(ref.rows) * ref.columns;
  for (std::size_t s = 0; s < n; ++s) {
    const DicomDataset& ds = datasets[order[s]];
    const SliceGeometry& g = geoms[order[s]];
    std::int16_t* dst = vol.voxels.data() + s * plane;
    for (std::size_t p = 0; p < plane; ++p) {
      dst[p] = to_hounsfield(g.rescale_slope * raw_pixel(ds, g, p) + g.rescale_intercept);
    }
  }
  vol.validate();
  return vol;
}

}  // namespace imhotep
