#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace imhotep {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;  // row-major, top row first
};

/// Lossless RGBA8 PNG. No timestamp or text chunks are written, so equal
/// pixels always give equal bytes.
std::vector<std::uint8_t> encode_png(int width, int height, std::span<const std::uint8_t> rgba);
Image decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> rgba);

}  // namespace imhotep
