#include "imhotep/patient/dicom.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace imhotep {
namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFFu;
constexpr DicomTag kItem{0xFFFE, 0xE000};
constexpr DicomTag kItemDelimiter{0xFFFE, 0xE00D};
constexpr DicomTag kSequenceDelimiter{0xFFFE, 0xE0DD};

bool has_long_length(std::string_view vr) {
  static constexpr std::array<std::string_view, 13> kLong{
      "OB", "OD", "OF", "OL", "OV", "OW", "SQ", "SV", "UC", "UN", "UR", "UT", "UV"};
  return std::find(kLong.begin(), kLong.end(), vr) != kLong.end();
}

std::string hex_tag(DicomTag t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "(%04X,%04X)", t.group, t.element);
  return buf;
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, bool explicit_vr)
      : bytes_(bytes), explicit_vr_(explicit_vr) {}

  bool at_end() const { return pos_ >= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  DicomTag tag() {
    DicomTag t;
    t.group = u16();
    t.element = u16();
    return t;
  }
  std::span<const std::uint8_t> take(std::uint32_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void need(std::size_t n) const {
    if (n > bytes_.size() - std::min(pos_, bytes_.size())) {
      fail(ErrorCode::TruncatedFile, "declared length exceeds input at offset " +
                                         std::to_string(pos_));
    }
  }

  /// Reads one element header. Item and delimiter tags carry no VR.
  void header(DicomTag& t, std::string& vr, std::uint32_t& length) {
    t = tag();
    vr.clear();
    if (t.group == 0xFFFE) {
      length = u32();
      return;
    }
    if (explicit_vr_) {
      auto raw = take(2);
      vr.assign(reinterpret_cast<const char*>(raw.data()), 2);
      if (!std::isupper(static_cast<unsigned char>(vr[0])) ||
          !std::isupper(static_cast<unsigned char>(vr[1]))) {
        fail(ErrorCode::BadMagic, "invalid value representation at " + hex_tag(t));
      }
      if (has_long_length(vr)) {
        u16();  // reserved
        length = u32();
      } else {
        length = u16();
      }
    } else {
      length = u32();
    }
  }

  /// Skips the contents of an undefined-length sequence up to and including
  /// its delimiter.
  void skip_undefined_sequence() {
    for (;;) {
      DicomTag t;
      std::string vr;
      std::uint32_t len = 0;
      header(t, vr, len);
      if (t == kSequenceDelimiter) return;
      if (t != kItem) fail(ErrorCode::BadMagic, "unexpected tag inside sequence " + hex_tag(t));
      if (len != kUndefinedLength) {
        take(len);
        continue;
      }
      skip_until_item_delimiter();
    }
  }

  void skip_until_item_delimiter() {
    for (;;) {
      DicomTag t;
      std::string vr;
      std::uint32_t len = 0;
      header(t, vr, len);
      if (t == kItemDelimiter) return;
      if (len == kUndefinedLength) {
        skip_undefined_sequence();
      } else {
        take(len);
      }
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  bool explicit_vr_;
};

/// Decodes top-level elements until the end of input, or until the first
/// element whose group differs from `only_group` when that is non-zero.
void parse_elements(Reader& r, DicomDataset& ds, std::uint16_t only_group = 0) {
  while (!r.at_end()) {
    const std::size_t start = r.pos();
    DicomTag t;
    std::string vr;
    std::uint32_t len = 0;
    if (only_group != 0) {
      const DicomTag peek = r.tag();
      r.seek(start);
      if (peek.group != only_group) return;
    }
    r.header(t, vr, len);
    if (t.group == 0xFFFE) {
      fail(ErrorCode::BadMagic, "item tag " + hex_tag(t) + " at top level");
    }
    if (len == kUndefinedLength) {
      if (t == tags::PixelData) {
        fail(ErrorCode::UnsupportedTransferSyntax,
             "encapsulated (compressed) pixel data is not supported");
      }
      r.skip_undefined_sequence();
      ds.tags[t] = DicomElement{vr, {}};
      continue;
    }
    auto value = r.take(len);
    if (t == tags::PixelData) {
      ds.pixel_data.assign(value.begin(), value.end());
      ds.tags[t] = DicomElement{vr, {}};
    } else if (vr == "SQ") {
      ds.tags[t] = DicomElement{vr, {}};
    } else {
      ds.tags[t] = DicomElement{vr, {value.begin(), value.end()}};
    }
  }
}

std::string trimmed(const std::vector<std::uint8_t>& v) {
  std::string s(v.begin(), v.end());
  while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
  std::size_t first = s.find_first_not_of(' ');
  return first == std::string::npos ? std::string{} : s.substr(first);
}

DicomDataset parse_headerless(std::span<const std::uint8_t> bytes) {
  DicomDataset ds;
  ds.transfer_syntax = TransferSyntax::ImplicitLE;
  try {
    Reader r(bytes, false);
    parse_elements(r, ds);
  } catch (const Error& e) {
    fail(ErrorCode::BadMagic, std::string("no DICM magic and not an implicit-LE stream: ") +
                                  e.what());
  }
  if (ds.tags.empty() || ds.tags.begin()->first.group < 0x0008) {
    fail(ErrorCode::BadMagic, "no DICM magic and no plausible implicit-LE elements");
  }
  return ds;
}

}  // namespace

std::optional<std::string> DicomDataset::string(DicomTag tag) const {
  auto it = tags.find(tag);
  if (it == tags.end()) return std::nullopt;
  return trimmed(it->second.value);
}

std::optional<std::vector<double>> DicomDataset::numbers(DicomTag tag) const {
  auto text = string(tag);
  if (!text) return std::nullopt;
  std::vector<double> out;
  std::size_t begin = 0;
  while (begin <= text->size()) {
    std::size_t end = text->find('\\', begin);
    if (end == std::string::npos) end = text->size();
    std::string part = text->substr(begin, end - begin);
    part.erase(0, part.find_first_not_of(' '));
    while (!part.empty() && part.back() == ' ') part.pop_back();
    if (!part.empty() && part.front() == '+') part.erase(0, 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      return std::nullopt;
    }
    out.push_back(value);
    begin = end + 1;
  }
  return out;
}

std::optional<std::uint16_t> DicomDataset::uint16(DicomTag tag) const {
  auto it = tags.find(tag);
  if (it == tags.end() || it->second.value.size() < 2) return std::nullopt;
  const auto& v = it->second.value;
  return static_cast<std::uint16_t>(v[0] | (v[1] << 8));
}

DicomDataset parse_dicom_file(std::span<const std::uint8_t> bytes) {
  const bool part10 = bytes.size() >= 132 && std::memcmp(bytes.data() + 128, "DICM", 4) == 0;
  if (!part10) return parse_headerless(bytes);

  auto body = bytes.subspan(132);
  DicomDataset meta;
  Reader meta_reader(body, true);
  parse_elements(meta_reader, meta, 0x0002);

  DicomDataset ds;
  std::string uid = meta.string(tags::TransferSyntaxUid).value_or(kImplicitLittleEndianUid);
  if (uid == kImplicitLittleEndianUid) {
    ds.transfer_syntax = TransferSyntax::ImplicitLE;
  } else if (uid == kExplicitLittleEndianUid) {
    ds.transfer_syntax = TransferSyntax::ExplicitLE;
  } else {
    fail(ErrorCode::UnsupportedTransferSyntax, "transfer syntax " + uid + " is not supported");
  }
  ds.tags = std::move(meta.tags);

  Reader r(body, ds.transfer_syntax == TransferSyntax::ExplicitLE);
  r.seek(meta_reader.pos());
  parse_elements(r, ds);
  return ds;
}

DicomDataset read_dicom_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::TruncatedFile, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_dicom_file(bytes);
}

SliceGeometry slice_geometry(const DicomDataset& ds) {
  auto missing = [](const char* name) {
    fail(ErrorCode::InconsistentGeometry, std::string("required attribute missing: ") + name);
  };
  SliceGeometry g;
  auto rows = ds.uint16(tags::Rows);
  auto cols = ds.uint16(tags::Columns);
  auto bits = ds.uint16(tags::BitsAllocated);
  if (!rows) missing("Rows");
  if (!cols) missing("Columns");
  if (!bits) missing("BitsAllocated");
  auto spacing = ds.numbers(tags::PixelSpacing);
  auto position = ds.numbers(tags::ImagePositionPatient);
  auto orientation = ds.numbers(tags::ImageOrientationPatient);
  auto slope = ds.numbers(tags::RescaleSlope);
  auto intercept = ds.numbers(tags::RescaleIntercept);
  if (!spacing || spacing->size() != 2) missing("PixelSpacing");
  if (!position || position->size() != 3) missing("ImagePositionPatient");
  if (!orientation || orientation->size() != 6) missing("ImageOrientationPatient");
  if (!slope || slope->size() != 1) missing("RescaleSlope");
  if (!intercept || intercept->size() != 1) missing("RescaleIntercept");

  g.rows = *rows;
  g.columns = *cols;
  g.bits_allocated = *bits;
  g.pixel_signed = ds.uint16(tags::PixelRepresentation).value_or(0) == 1;
  g.pixel_spacing = Vec2((*spacing)[0], (*spacing)[1]);
  g.position = Vec3((*position)[0], (*position)[1], (*position)[2]);
  g.row_direction = Vec3((*orientation)[0], (*orientation)[1], (*orientation)[2]);
  g.column_direction = Vec3((*orientation)[3], (*orientation)[4], (*orientation)[5]);
  g.rescale_slope = (*slope)[0];
  g.rescale_intercept = (*intercept)[0];

  if (g.rows < 1 || g.columns < 1) {
    fail(ErrorCode::InconsistentGeometry, "Rows and Columns must be positive");
  }
  if (g.bits_allocated != 8 && g.bits_allocated != 16) {
    fail(ErrorCode::InconsistentGeometry,
         "BitsAllocated " + std::to_string(g.bits_allocated) + " is not supported");
  }
  if (!(g.pixel_spacing[0] > 0.0) || !(g.pixel_spacing[1] > 0.0)) {
    fail(ErrorCode::InconsistentGeometry, "PixelSpacing must be positive");
  }
  const std::size_t expected =
      static_cast<std::size_t>(g.rows) * g.columns * (g.bits_allocated / 8);
  // Odd-length values carry one padding byte.
  const bool padded = expected % 2 == 1 && ds.pixel_data.size() == expected + 1;
  if (ds.pixel_data.size() != expected && !padded) {
    fail(ErrorCode::InconsistentGeometry,
         "pixel data holds " + std::to_string(ds.pixel_data.size()) + " bytes, expected " +
             std::to_string(expected));
  }
  return g;
}

std::int32_t raw_pixel(const DicomDataset& ds, const SliceGeometry& geom, std::size_t index) {
  if (geom.bits_allocated == 8) {
    const std::uint8_t b = ds.pixel_data[index];
    return geom.pixel_signed ? static_cast<std::int8_t>(b) : b;
  }
  const std::uint16_t w =
      static_cast<std::uint16_t>(ds.pixel_data[2 * index] | (ds.pixel_data[2 * index + 1] << 8));
  return geom.pixel_signed ? static_cast<std::int16_t>(w) : w;
}

}  // namespace imhotep
