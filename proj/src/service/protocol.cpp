#include "imhotep/service/protocol.hpp"

#include "imhotep/core/error.hpp"
#include "imhotep/render/png.hpp"

#include <cstring>

namespace imhotep {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[off + static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

WireMessage parse_wire_message(std::string_view text, std::optional<std::int64_t>& id_out) {
  id_out.reset();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadPayload, std::string("message is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::BadPayload, "message must be a JSON object");
  if (j.contains("id") && j["id"].is_number_integer()) id_out = j["id"].get<std::int64_t>();

  WireMessage msg;
  if (!id_out || *id_out < 0) fail(ErrorCode::BadPayload, "field 'id' must be a non-negative integer");
  msg.id = *id_out;
  if (!j.contains("type") || !j["type"].is_string()) {
    fail(ErrorCode::BadPayload, "field 'type' must be a string");
  }
  msg.type = j["type"].get<std::string>();
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) fail(ErrorCode::BadPayload, "field 'payload' must be an object");
    msg.payload = j["payload"];
  }
  return msg;
}

std::string make_reply(std::optional<std::int64_t> id, std::string_view type,
                       const nlohmann::json& payload) {
  nlohmann::json j;
  j["id"] = id ? nlohmann::json(*id) : nlohmann::json(nullptr);
  j["type"] = type;
  j["payload"] = payload;
  return j.dump();
}

std::vector<std::uint8_t> FramePacket::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderSize + payload.size());
  out.insert(out.end(), {'I', 'M', 'F', 'R'});
  put_u32(out, width);
  put_u32(out, height);
  put_u32(out, static_cast<std::uint32_t>(format));
  put_u32(out, static_cast<std::uint32_t>(eye));
  put_u32(out, sequence);
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

FramePacket FramePacket::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderSize || std::memcmp(bytes.data(), "IMFR", 4) != 0) {
    fail(ErrorCode::BadPayload, "not a frame packet");
  }
  FramePacket p;
  p.width = get_u32(bytes, 4);
  p.height = get_u32(bytes, 8);
  const std::uint32_t format = get_u32(bytes, 12);
  const std::uint32_t eye = get_u32(bytes, 16);
  p.sequence = get_u32(bytes, 20);
  const std::uint32_t length = get_u32(bytes, 24);
  if (format > 1 || eye > 2) fail(ErrorCode::BadPayload, "frame packet has unknown format or eye");
  p.format = static_cast<FrameFormat>(format);
  p.eye = static_cast<Eye>(eye);
  if (bytes.size() != kFrameHeaderSize + length) {
    fail(ErrorCode::BadPayload, "frame packet length does not match its header");
  }
  if (p.format == FrameFormat::Raw &&
      static_cast<std::uint64_t>(length) != 4ull * p.width * p.height) {
    fail(ErrorCode::BadPayload, "raw frame payload must be 4*w*h bytes");
  }
  p.payload.assign(bytes.begin() + kFrameHeaderSize, bytes.end());
  return p;
}

FramePacket encode_frame(const Framebuffer& fb, Eye eye, std::uint32_t sequence, FrameFormat format) {
  if (fb.width <= 0 || fb.height <= 0) fail(ErrorCode::InvalidArgument, "empty framebuffer");
  FramePacket p;
  p.width = static_cast<std::uint32_t>(fb.width);
  p.height = static_cast<std::uint32_t>(fb.height);
  p.format = format;
  p.eye = eye;
  p.sequence = sequence;
  p.payload = format == FrameFormat::Raw ? fb.color : encode_png(fb.width, fb.height, fb.color);
  return p;
}

std::vector<std::uint8_t> frame_pixels(const FramePacket& packet) {
  if (packet.format == FrameFormat::Raw) return packet.payload;
  return decode_png(packet.payload).rgba;
}

}  // namespace imhotep
