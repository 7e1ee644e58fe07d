#pragma once

#include "imhotep/patient/dicom.hpp"
#include "imhotep/volume/volume.hpp"

#include <span>

namespace imhotep {

/// Relative tolerance on inter-slice gaps, as a fraction of the mean gap.
inline constexpr double kSliceGapTolerance = 0.01;

/// Stacks single-slice datasets into a volume.
///
/// Slices are ordered by the projection of ImagePositionPatient onto the
/// slice normal (row x column direction), so the result does not depend on
/// input order. Voxels hold round(slope * raw + intercept), saturated to the
/// int16 range.
Volume assemble_series(std::span<const DicomDataset> datasets);

}  // namespace imhotep
