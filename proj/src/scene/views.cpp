#include "imhotep/scene/views.hpp"

#include "imhotep/core/error.hpp"

#include <cmath>

namespace imhotep {

Vec3 ViewPreset::forward() const { return orientation.conjugate() * Vec3(0.0, 0.0, -1.0); }
Vec3 ViewPreset::up() const { return orientation.conjugate() * Vec3(0.0, 1.0, 0.0); }

ViewPreset make_view_preset(std::string name, const Vec3& forward, const Vec3& up) {
  const Vec3 f = forward.normalized();
  const Vec3 r = f.cross(up).normalized();
  const Vec3 u = r.cross(f);
  Mat3 world_to_camera;
  world_to_camera.row(0) = r;
  world_to_camera.row(1) = u;
  world_to_camera.row(2) = -f;
  ViewPreset p;
  p.name = std::move(name);
  p.orientation = Quat(world_to_camera).normalized();
  return p;
}

ViewRegistry ViewRegistry::standard() {
  ViewRegistry r;
  r.add(make_view_preset("coronal", Vec3::UnitY(), Vec3::UnitZ()));
  r.add(make_view_preset("sagittal", Vec3::UnitX(), Vec3::UnitZ()));
  r.add(make_view_preset("transverse", -Vec3::UnitZ(), Vec3::UnitY()));
  return r;
}

void ViewRegistry::add(ViewPreset preset) {
  if (preset.name.empty()) fail(ErrorCode::InvalidArgument, "view preset needs a name");
  if (std::abs(preset.orientation.norm() - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidArgument, "view preset quaternion must have unit norm");
  }
  const std::string key = preset.name;
  presets_[key] = std::move(preset);
}

const ViewPreset& ViewRegistry::find(const std::string& name) const {
  auto it = presets_.find(name);
  if (it == presets_.end()) fail(ErrorCode::UnknownPreset, "unknown view preset '" + name + "'");
  return it->second;
}

std::vector<std::string> ViewRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : presets_) out.push_back(name);
  return out;
}

Camera apply_view(const RoomLayout& room, const ViewPreset& preset, const ViewportSpec& viewport) {
  const double distance = kViewDistanceFactor * room.workspace_size_mm();
  const Vec3 center = room.workspace_center_mm();
  const Vec3 f = preset.forward();
  return look_along(center - distance * f, f, preset.up(), viewport.width, viewport.height,
                    viewport.vertical_fov, 0.01 * distance, 10.0 * distance);
}

Camera orbit_camera(const Camera& cam, const Vec3& pivot, double yaw_deg, double pitch_deg,
                    double zoom) {
  if (!(zoom > 0.0)) fail(ErrorCode::InvalidArgument, "zoom must be > 0");
  constexpr double kDeg = EIGEN_PI / 180.0;
  const Eigen::AngleAxisd yaw(-yaw_deg * kDeg, cam.up);
  const Eigen::AngleAxisd pitch(pitch_deg * kDeg, yaw * cam.right);
  const Mat3 rot = (pitch * yaw).toRotationMatrix();

  Camera out = cam;
  const Vec3 offset = rot * (cam.eye - pivot) / zoom;
  out.eye = pivot + offset;
  out.forward = (rot * cam.forward).normalized();
  out.up = (rot * cam.up).normalized();
  out.right = out.forward.cross(out.up).normalized();
  out.up = out.right.cross(out.forward).normalized();
  const double old_distance = (cam.eye - pivot).norm();
  if (old_distance > 0.0) {
    const double scale = offset.norm() / old_distance;
    out.near_plane = cam.near_plane * scale;
    out.far_plane = cam.far_plane * scale;
  }
  out.validate();
  return out;
}

}  // namespace imhotep
