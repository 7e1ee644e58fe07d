#pragma once

#include "imhotep/core/geometry.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace imhotep {

enum class SlotKind { Text, Image, Labs };

struct ScreenSlot {
  std::string id;
  SlotKind kind = SlotKind::Image;
  double u0 = 0.0, v0 = 0.0, u1 = 1.0, v1 = 1.0;

  bool contains(double u, double v) const { return u >= u0 && u <= u1 && v >= v0 && v <= v1; }
};

/// Cylindrical screen surrounding the user. Room coordinates are metres
/// with +z up; `center` is the base of the cylinder axis. Positive angles
/// turn clockwise seen from above, so u grows from the viewer's left to
/// right.
struct CurvedScreen {
  Vec3 center = Vec3::Zero();
  double radius = 4.0;
  double angular_span = 210.0 * EIGEN_PI / 180.0;
  double v_min = 0.5;
  double v_max = 2.9;
  Vec2 forward = Vec2::UnitY();
  std::vector<ScreenSlot> slots;

  void validate() const;
  const ScreenSlot* slot_at(double u, double v) const;
};

struct RoomLayout {
  Vec3 workspace_center = Vec3(0.0, 0.0, 1.5);  // m
  double workspace_size = 2.0;                  // m
  Vec3 user_position = Vec3(0.0, -2.5, 1.5);    // m
  CurvedScreen screen;

  void validate() const;
  Vec3 workspace_center_mm() const { return workspace_center * 1000.0; }
  double workspace_size_mm() const { return workspace_size * 1000.0; }
};

/// Default room: screen centred under the user, facing the workspace, with
/// fixed slots for the record text, labs and three image panels.
RoomLayout default_room_layout();

RoomLayout room_layout_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RoomLayout& room);

std::string_view to_string(SlotKind kind);

/// Point on the screen surface for normalised (u, v), in room metres.
/// u and v must lie in [0, 1].
Vec3 screen_uv_to_world(const CurvedScreen& s, double u, double v);

struct ScreenHit {
  double u = 0.0;
  double v = 0.0;
  double t = 0.0;
};

/// Nearest forward intersection of a unit-direction ray (room metres) with
/// the screen's cylinder shell inside its angular span and height range.
std::optional<ScreenHit> ray_screen_intersect(const CurvedScreen& s, const Ray& ray);

}  // namespace imhotep
