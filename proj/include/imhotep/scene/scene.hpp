#pragma once

#include "imhotep/patient/patient_directory.hpp"
#include "imhotep/render/frame.hpp"
#include "imhotep/scene/labels.hpp"
#include "imhotep/scene/picking.hpp"
#include "imhotep/scene/room.hpp"
#include "imhotep/scene/views.hpp"

#include <optional>
#include <string>
#include <vector>

namespace imhotep {

struct OrganState {
  int mesh_id = 0;
  bool visible = true;
  std::optional<double> opacity_override;
};

struct SceneOrgan {
  int id = 0;
  std::shared_ptr<const TriangleMesh> mesh;
  Appearance appearance;
  OrganState state;

  double effective_opacity() const { return state.opacity_override.value_or(appearance.opacity); }
};

enum class Tool { Pointer, ViewControl, Annotation, Opacity };

/// Abstract state of the tool palette; the viewer shows tools as panels.
struct ToolState {
  Tool active = Tool::Pointer;
};

std::string_view to_string(Tool tool);

/// The virtual room: the 3D workspace with the patient content, the curved
/// 2D screen and the tool palette. A Scene is a value; copies share the
/// immutable mesh and volume data, so a copy is a cheap render snapshot.
struct Scene {
  RoomLayout room = default_room_layout();
  ViewRegistry views = ViewRegistry::standard();
  ViewportSpec viewport;

  std::vector<SceneOrgan> organs;
  std::shared_ptr<const Volume> volume;
  PatientRecord record;
  std::vector<Annotation> annotations;
  TransferFunction transfer_function = default_ct_transfer_function();
  LightingParams lighting;

  Affine3 model = Affine3::Identity();  // patient mm -> world mm
  Camera camera;
  std::string active_view = "coronal";
  ToolState tools;
  LabelLayout labels;
  bool loaded = false;
};

/// Uniform scale + translation placing the combined bounding box of the
/// meshes (and volume) at the workspace centre with its longest edge equal
/// to the workspace size. Throws EmptyScene when there is no content.
Affine3 fit_to_workspace(const std::vector<const TriangleMesh*>& meshes, const Volume* volume,
                         const RoomLayout& room);

/// Installs a loaded patient: organ ids follow manifest order from 0, the
/// content is fitted to the workspace and the coronal view is applied.
void load_into_scene(Scene& scene, PatientBundle bundle);

/// Sets the camera from a registered preset (UnknownPreset otherwise).
void set_view(Scene& scene, const std::string& view_name);

void orbit(Scene& scene, double yaw_deg, double pitch_deg, double zoom);

/// Throws UnknownMesh / InvalidArgument.
void set_organ_opacity(Scene& scene, int mesh_id, double alpha);

/// Adds a point marker with the next free id and returns it.
const Annotation& add_annotation(Scene& scene, const Vec3& position, const Vec3& normal,
                                 std::string text);

/// Recomputes label push-out distances for the current camera.
void update_labels(Scene& scene);

std::vector<PickTarget> pick_targets(const Scene& scene);

RenderScene to_render_scene(const Scene& scene);

}  // namespace imhotep
