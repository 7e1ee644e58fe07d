#pragma once

#include "imhotep/render/camera.hpp"
#include "imhotep/scene/room.hpp"

#include <map>
#include <string>
#include <vector>

namespace imhotep {

/// Named camera orientation. `orientation` rotates patient-frame vectors
/// into the camera frame (x right, y up, looking down -z). Patient axes are
/// LPS: +x left, +y posterior, +z superior.
struct ViewPreset {
  std::string name;
  Quat orientation = Quat::Identity();

  Vec3 forward() const;
  Vec3 up() const;
};

ViewPreset make_view_preset(std::string name, const Vec3& forward, const Vec3& up);

class ViewRegistry {
 public:
  /// Registry holding coronal, sagittal and transverse.
  static ViewRegistry standard();

  void add(ViewPreset preset);
  /// Throws UnknownPreset.
  const ViewPreset& find(const std::string& name) const;
  bool contains(const std::string& name) const { return presets_.contains(name); }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ViewPreset> presets_;
};

struct ViewportSpec {
  int width = 512;
  int height = 512;
  double vertical_fov = EIGEN_PI / 3.0;
};

/// Orbit distance from the workspace centre, as a multiple of its size.
inline constexpr double kViewDistanceFactor = 1.5;

/// Camera orbiting the workspace centre at 1.5 x workspace size (mm),
/// oriented by the preset.
Camera apply_view(const RoomLayout& room, const ViewPreset& preset, const ViewportSpec& viewport);

/// Rotates `cam` about `pivot`: yaw around the camera up axis, then pitch
/// around the camera right axis (degrees), then divides the distance to the
/// pivot by `zoom`.
Camera orbit_camera(const Camera& cam, const Vec3& pivot, double yaw_deg, double pitch_deg,
                    double zoom);

}  // namespace imhotep
