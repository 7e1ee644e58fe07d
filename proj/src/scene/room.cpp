#include "imhotep/scene/room.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace imhotep {
namespace {

constexpr double kAngleSlack = 1e-12;

Vec3 vec3_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::InvalidArgument, "expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

SlotKind slot_kind_from(const std::string& s) {
  if (s == "text") return SlotKind::Text;
  if (s == "image") return SlotKind::Image;
  if (s == "labs") return SlotKind::Labs;
  fail(ErrorCode::InvalidArgument, "unknown slot kind '" + s + "'");
}

/// Rotates a horizontal direction clockwise (seen from +z) by `theta`.
Vec2 rotate_cw(const Vec2& f, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return Vec2(f.x() * c + f.y() * s, -f.x() * s + f.y() * c);
}

}  // namespace

std::string_view to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::Text: return "text";
    case SlotKind::Image: return "image";
    case SlotKind::Labs: return "labs";
  }
  return "image";
}

void CurvedScreen::validate() const {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "screen radius must be > 0");
  if (!(angular_span > 0.0 && angular_span <= 2.0 * EIGEN_PI + 1e-12)) {
    fail(ErrorCode::InvalidArgument, "screen angular span must be in (0, 2pi]");
  }
  if (!(v_min < v_max)) fail(ErrorCode::InvalidArgument, "screen v_min must be < v_max");
  if (std::abs(forward.norm() - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidArgument, "screen forward must be a unit vector");
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& a = slots[i];
    if (a.id.empty()) fail(ErrorCode::InvalidArgument, "screen slot id is empty");
    if (!(0.0 <= a.u0 && a.u0 < a.u1 && a.u1 <= 1.0 && 0.0 <= a.v0 && a.v0 < a.v1 && a.v1 <= 1.0)) {
      fail(ErrorCode::InvalidArgument, "screen slot '" + a.id + "' is not inside [0,1]^2");
    }
    for (std::size_t k = 0; k < i; ++k) {
      const auto& b = slots[k];
      if (a.id == b.id) fail(ErrorCode::InvalidArgument, "duplicate screen slot '" + a.id + "'");
      const bool overlap = a.u0 < b.u1 && b.u0 < a.u1 && a.v0 < b.v1 && b.v0 < a.v1;
      if (overlap) {
        fail(ErrorCode::InvalidArgument, "screen slots '" + a.id + "' and '" + b.id + "' overlap");
      }
    }
  }
}

const ScreenSlot* CurvedScreen::slot_at(double u, double v) const {
  for (const auto& s : slots) {
    if (s.contains(u, v)) return &s;
  }
  return nullptr;
}

void RoomLayout::validate() const {
  if (!(workspace_size > 0.0)) fail(ErrorCode::InvalidArgument, "workspace_size must be > 0");
  if (!((user_position - workspace_center).norm() > 0.0)) {
    fail(ErrorCode::InvalidArgument, "user must stand away from the workspace center");
  }
  screen.validate();
}

RoomLayout default_room_layout() {
  RoomLayout room;
  room.screen.center = Vec3(room.user_position.x(), room.user_position.y(), 0.0);
  const Vec3 to_ws = room.workspace_center - room.user_position;
  room.screen.forward = Vec2(to_ws.x(), to_ws.y()).normalized();
  room.screen.slots = {
      {"record", SlotKind::Text, 0.02, 0.05, 0.30, 0.95},
      {"image_main", SlotKind::Image, 0.34, 0.68, 0.66, 0.95},
      {"image_left", SlotKind::Image, 0.34, 0.05, 0.49, 0.30},
      {"image_right", SlotKind::Image, 0.51, 0.05, 0.66, 0.30},
      {"labs", SlotKind::Labs, 0.70, 0.05, 0.98, 0.95},
  };
  room.validate();
  return room;
}

RoomLayout room_layout_from_json(const nlohmann::json& j) {
  RoomLayout room = default_room_layout();
  try {
    if (j.contains("workspace_center")) room.workspace_center = vec3_from(j["workspace_center"]);
    if (j.contains("workspace_size")) room.workspace_size = j["workspace_size"].get<double>();
    if (j.contains("user_position")) room.user_position = vec3_from(j["user_position"]);
    if (j.contains("screen")) {
      const auto& s = j["screen"];
      auto& scr = room.screen;
      if (s.contains("center")) scr.center = vec3_from(s["center"]);
      if (s.contains("radius")) scr.radius = s["radius"].get<double>();
      if (s.contains("angular_span")) scr.angular_span = s["angular_span"].get<double>();
      if (s.contains("v_min")) scr.v_min = s["v_min"].get<double>();
      if (s.contains("v_max")) scr.v_max = s["v_max"].get<double>();
      if (s.contains("forward")) {
        const auto& f = s["forward"];
        scr.forward = Vec2(f.at(0).get<double>(), f.at(1).get<double>());
      }
      if (s.contains("slots")) {
        scr.slots.clear();
        for (const auto& slot : s["slots"]) {
          scr.slots.push_back({slot.at("id").get<std::string>(),
                               slot_kind_from(slot.at("kind").get<std::string>()),
                               slot.at("u0").get<double>(), slot.at("v0").get<double>(),
                               slot.at("u1").get<double>(), slot.at("v1").get<double>()});
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("room layout: ") + e.what());
  }
  room.validate();
  return room;
}

nlohmann::json to_json(const RoomLayout& room) {
  const auto& s = room.screen;
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& slot : s.slots) {
    slots.push_back({{"id", slot.id},
                     {"kind", to_string(slot.kind)},
                     {"u0", slot.u0},
                     {"v0", slot.v0},
                     {"u1", slot.u1},
                     {"v1", slot.v1}});
  }
  auto v3 = [](const Vec3& v) { return nlohmann::json{v.x(), v.y(), v.z()}; };
  return {{"workspace_center", v3(room.workspace_center)},
          {"workspace_size", room.workspace_size},
          {"user_position", v3(room.user_position)},
          {"screen",
           {{"center", v3(s.center)},
            {"radius", s.radius},
            {"angular_span", s.angular_span},
            {"v_min", s.v_min},
            {"v_max", s.v_max},
            {"forward", {s.forward.x(), s.forward.y()}},
            {"slots", std::move(slots)}}}};
}

Vec3 screen_uv_to_world(const CurvedScreen& s, double u, double v) {
  assert(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0);
  const double theta = (u - 0.5) * s.angular_span;
  const Vec2 dir = rotate_cw(s.forward, theta);
  const double height = s.v_min + v * (s.v_max - s.v_min);
  return Vec3(s.center.x() + s.radius * dir.x(), s.center.y() + s.radius * dir.y(),
              s.center.z() + height);
}

std::optional<ScreenHit> ray_screen_intersect(const CurvedScreen& s, const Ray& ray) {
  const double ox = ray.origin.x() - s.center.x();
  const double oy = ray.origin.y() - s.center.y();
  const double dx = ray.dir.x(), dy = ray.dir.y();
  const double a = dx * dx + dy * dy;
  if (a == 0.0) return std::nullopt;
  const double b = 2.0 * (ox * dx + oy * dy);
  const double c = ox * ox + oy * oy - s.radius * s.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = -0.5 * (b + std::copysign(root, b));
  double t0 = q / a;
  double t1 = q != 0.0 ? c / q : t0;
  if (t0 > t1) std::swap(t0, t1);

  for (double t : {t0, t1}) {
    if (!(t > 0.0)) continue;
    const Vec3 p = ray.origin + t * ray.dir;
    const Vec2 h = Vec2(p.x() - s.center.x(), p.y() - s.center.y()) / s.radius;
    const double ccw = std::atan2(s.forward.x() * h.y() - s.forward.y() * h.x(), s.forward.dot(h));
    const double theta = -ccw;
    if (std::abs(theta) > 0.5 * s.angular_span + kAngleSlack) continue;
    const double v = (p.z() - s.center.z() - s.v_min) / (s.v_max - s.v_min);
    if (v < 0.0 || v > 1.0) continue;
    const double u = std::clamp(theta / s.angular_span + 0.5, 0.0, 1.0);
    return ScreenHit{u, v, t};
  }
  return std::nullopt;
}

}  // namespace imhotep
