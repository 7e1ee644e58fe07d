#pragma once

#include "imhotep/render/framebuffer.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace imhotep {

/// JSON text command: {"id": N, "type": "...", "payload": {...}}.
struct WireMessage {
  std::int64_t id = 0;
  std::string type;
  nlohmann::json payload = nlohmann::json::object();
};

/// Parses a command. Throws BadPayload (naming the field) on malformed
/// input; `id_out` receives the id whenever it could be read.
WireMessage parse_wire_message(std::string_view text, std::optional<std::int64_t>& id_out);

std::string make_reply(std::optional<std::int64_t> id, std::string_view type,
                       const nlohmann::json& payload = nlohmann::json::object());

enum class FrameFormat : std::uint32_t { Raw = 0, Png = 1 };
enum class Eye : std::uint32_t { Mono = 0, Left = 1, Right = 2 };

inline constexpr std::size_t kFrameHeaderSize = 28;

/// Binary frame: "IMFR", then little-endian u32 width, height, format, eye,
/// sequence, payload length, then the payload. Raw payloads are RGBA8,
/// row-major from the top row.
struct FramePacket {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  FrameFormat format = FrameFormat::Raw;
  Eye eye = Eye::Mono;
  std::uint32_t sequence = 0;
  std::vector<std::uint8_t> payload;

  std::vector<std::uint8_t> serialize() const;
  /// Throws BadPayload on a malformed packet.
  static FramePacket parse(std::span<const std::uint8_t> bytes);
};

FramePacket encode_frame(const Framebuffer& fb, Eye eye, std::uint32_t sequence, FrameFormat format);

/// Decoded RGBA8 pixels of a packet of either format.
std::vector<std::uint8_t> frame_pixels(const FramePacket& packet);

using Reply = std::variant<std::string, FramePacket>;

}  // namespace imhotep
