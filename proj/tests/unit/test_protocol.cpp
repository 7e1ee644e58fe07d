#include "imhotep/core/error.hpp"
#include "imhotep/service/protocol.hpp"

#include <doctest.h>

#include <random>

using namespace imhotep;

namespace {

Framebuffer solid(int w, int h, std::array<std::uint8_t, 4> px) {
  Framebuffer fb(w, h);
  for (std::size_t i = 0; i < fb.color.size(); i += 4) std::copy(px.begin(), px.end(), fb.color.begin() + i);
  return fb;
}

ErrorCode parse_code(std::string_view text, std::optional<std::int64_t>& id) {
  try {
    parse_wire_message(text, id);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("2x2 red raw frame layout") {
    const FramePacket p = encode_frame(solid(2, 2, {255, 0, 0, 255}), Eye::Right, 7, FrameFormat::Raw);
    const auto bytes = p.serialize();
    const std::vector<std::uint8_t> expect{
        'I', 'M', 'F', 'R',  //
        2, 0, 0, 0,          // width
        2, 0, 0, 0,          // height
        0, 0, 0, 0,          // raw
        2, 0, 0, 0,          // right eye
        7, 0, 0, 0,          // sequence
        16, 0, 0, 0,         // payload length
        0xFF, 0, 0, 0xFF, 0xFF, 0, 0, 0xFF, 0xFF, 0, 0, 0xFF, 0xFF, 0, 0, 0xFF};
    CHECK(bytes.size() == 28 + 16);
    CHECK(bytes == expect);
  }

  TEST_CASE("raw order is row-major from the top") {
    Framebuffer fb(2, 2);
    for (int i = 0; i < 4; ++i) fb.color[4 * i] = static_cast<std::uint8_t>(10 * (i + 1));
    const auto bytes = encode_frame(fb, Eye::Mono, 1, FrameFormat::Raw).serialize();
    CHECK(bytes[28] == 10);
    CHECK(bytes[32] == 20);  // (1, 0)
    CHECK(bytes[36] == 30);  // (0, 1)
  }

  TEST_CASE("png payload decodes to the same pixels") {
    std::mt19937 rng(4);
    Framebuffer fb(37, 23);
    for (auto& c : fb.color) c = static_cast<std::uint8_t>(rng());
    const FramePacket p = encode_frame(fb, Eye::Left, 3, FrameFormat::Png);
    CHECK(p.format == FrameFormat::Png);
    const FramePacket back = FramePacket::parse(p.serialize());
    CHECK(back.width == 37);
    CHECK(back.height == 23);
    CHECK(back.eye == Eye::Left);
    CHECK(back.sequence == 3);
    CHECK(frame_pixels(back) == fb.color);
  }

  TEST_CASE("packet parse round trip and rejects") {
    const FramePacket p = encode_frame(solid(3, 1, {1, 2, 3, 4}), Eye::Mono, 9, FrameFormat::Raw);
    auto bytes = p.serialize();
    const FramePacket back = FramePacket::parse(bytes);
    CHECK(back.payload == p.payload);
    CHECK(back.sequence == 9);

    auto expect_bad = [](std::vector<std::uint8_t> b) {
      try {
        FramePacket::parse(b);
      } catch (const Error& e) {
        return e.code() == ErrorCode::BadPayload;
      }
      return false;
    };
    CHECK(expect_bad({}));
    auto wrong_magic = bytes;
    wrong_magic[0] = 'X';
    CHECK(expect_bad(wrong_magic));
    auto truncated = bytes;
    truncated.pop_back();
    CHECK(expect_bad(truncated));
    auto bad_eye = bytes;
    bad_eye[16] = 3;
    CHECK(expect_bad(bad_eye));
    auto bad_len = bytes;  // header and payload agree but 4*w*h does not
    bad_len[4] = 4;
    CHECK(expect_bad(bad_len));
  }

  TEST_CASE("empty framebuffer is rejected") {
    CHECK_THROWS_AS(encode_frame(Framebuffer{}, Eye::Mono, 1, FrameFormat::Raw), Error);
  }

  TEST_CASE("wire message parsing") {
    std::optional<std::int64_t> id;
    const WireMessage m = parse_wire_message(R"({"id":4,"type":"set_view","payload":{"view":"coronal"}})", id);
    CHECK(id == 4);
    CHECK(m.id == 4);
    CHECK(m.type == "set_view");
    CHECK(m.payload["view"] == "coronal");

    const WireMessage bare = parse_wire_message(R"({"id":0,"type":"get_scene"})", id);
    CHECK(bare.payload.is_object());
    CHECK(bare.payload.empty());

    CHECK(parse_code("not json", id) == ErrorCode::BadPayload);
    CHECK_FALSE(id);
    CHECK(parse_code("[1,2]", id) == ErrorCode::BadPayload);
    CHECK(parse_code(R"({"type":"x"})", id) == ErrorCode::BadPayload);
    CHECK(parse_code(R"({"id":-1,"type":"x"})", id) == ErrorCode::BadPayload);
    CHECK(parse_code(R"({"id":5,"type":3})", id) == ErrorCode::BadPayload);
    CHECK(id == 5);
    CHECK(parse_code(R"({"id":6,"type":"x","payload":[]})", id) == ErrorCode::BadPayload);
  }

  TEST_CASE("replies echo ids") {
    const auto r = nlohmann::json::parse(make_reply(12, "ack", {{"task", 3}}));
    CHECK(r["id"] == 12);
    CHECK(r["type"] == "ack");
    CHECK(r["payload"]["task"] == 3);
    CHECK(nlohmann::json::parse(make_reply(std::nullopt, "patient_loaded"))["id"].is_null());
  }
}
