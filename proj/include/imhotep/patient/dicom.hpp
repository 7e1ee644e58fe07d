#pragma once

#include "imhotep/core/geometry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace imhotep {

struct DicomTag {
  std::uint16_t group = 0;
  std::uint16_t element = 0;

  constexpr auto operator<=>(const DicomTag&) const = default;
};

namespace tags {
inline constexpr DicomTag TransferSyntaxUid{0x0002, 0x0010};
inline constexpr DicomTag ImagePositionPatient{0x0020, 0x0032};
inline constexpr DicomTag ImageOrientationPatient{0x0020, 0x0037};
inline constexpr DicomTag Rows{0x0028, 0x0010};
inline constexpr DicomTag Columns{0x0028, 0x0011};
inline constexpr DicomTag PixelSpacing{0x0028, 0x0030};
inline constexpr DicomTag BitsAllocated{0x0028, 0x0100};
inline constexpr DicomTag PixelRepresentation{0x0028, 0x0103};
inline constexpr DicomTag RescaleIntercept{0x0028, 0x1052};
inline constexpr DicomTag RescaleSlope{0x0028, 0x1053};
inline constexpr DicomTag PixelData{0x7FE0, 0x0010};
}  // namespace tags

enum class TransferSyntax { ImplicitLE, ExplicitLE };

inline constexpr const char* kImplicitLittleEndianUid = "1.2.840.10008.1.2";
inline constexpr const char* kExplicitLittleEndianUid = "1.2.840.10008.1.2.1";

struct DicomElement {
  std::string vr;  // empty for implicit-VR datasets
  std::vector<std::uint8_t> value;
};

/// Top-level attributes of one DICOM file. Sequence contents are skipped;
/// the sequence element itself is kept with an empty value.
struct DicomDataset {
  std::map<DicomTag, DicomElement> tags;
  std::vector<std::uint8_t> pixel_data;
  TransferSyntax transfer_syntax = TransferSyntax::ImplicitLE;

  bool has(DicomTag tag) const { return tags.contains(tag); }

  /// Value as text with trailing NUL / space padding removed.
  std::optional<std::string> string(DicomTag tag) const;
  /// Backslash-separated decimal strings (DS / IS).
  std::optional<std::vector<double>> numbers(DicomTag tag) const;
  /// 16-bit unsigned value (US).
  std::optional<std::uint16_t> uint16(DicomTag tag) const;
};

/// Geometry and pixel description of one image slice, extracted from the
/// attributes required for volume assembly.
struct SliceGeometry {
  int rows = 0;
  int columns = 0;
  Vec2 pixel_spacing = Vec2::Ones();  // (row spacing, column spacing) in mm
  Vec3 position = Vec3::Zero();
  Vec3 row_direction = Vec3::UnitX();
  Vec3 column_direction = Vec3::UnitY();
  double rescale_slope = 1.0;
  double rescale_intercept = 0.0;
  int bits_allocated = 16;
  bool pixel_signed = false;
};

/// Parses a Part-10 file (128-byte preamble + "DICM") or, as a fallback, a
/// headerless implicit little-endian stream.
DicomDataset parse_dicom_file(std::span<const std::uint8_t> bytes);

DicomDataset read_dicom_file(const std::string& path);

/// Checks the image invariants (required tags, pixel buffer size) and
/// returns the decoded geometry. Throws InconsistentGeometry on violation.
SliceGeometry slice_geometry(const DicomDataset& ds);

/// Raw stored value of pixel `index` (before rescale).
std::int32_t raw_pixel(const DicomDataset& ds, const SliceGeometry& geom, std::size_t index);

}  // namespace imhotep
