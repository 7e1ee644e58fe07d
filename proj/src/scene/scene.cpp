#include "imhotep/scene/scene.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>

namespace imhotep {

std::string_view to_string(Tool tool) {
  switch (tool) {
    case Tool::Pointer: return "pointer";
    case Tool::ViewControl: return "view_control";
    case Tool::Annotation: return "annotation";
    case Tool::Opacity: return "opacity";
  }
  return "pointer";
}

Affine3 fit_to_workspace(const std::vector<const TriangleMesh*>& meshes, const Volume* volume,
                         const RoomLayout& room) {
  Aabb box;
  for (const auto* m : meshes) {
    if (m) box.extend(m->bounds());
  }
  if (volume) {
    const Vec3 hi = volume->index_extent();
    for (int corner = 0; corner < 8; ++corner) {
      const Vec3 ijk((corner & 1) ? hi.x() : 0.0, (corner & 2) ? hi.y() : 0.0,
                     (corner & 4) ? hi.z() : 0.0);
      box.extend(volume->index_to_world(ijk));
    }
  }
  if (box.empty()) fail(ErrorCode::EmptyScene, "nothing to fit: no meshes and no volume");

  const double longest = box.extent().maxCoeff();
  const double scale = longest > 0.0 ? room.workspace_size_mm() / longest : 1.0;
  Affine3 t = Affine3::Identity();
  t.translation() = room.workspace_center_mm() - scale * box.center();
  t.linear() = scale * Mat3::Identity();
  return t;
}

void load_into_scene(Scene& scene, PatientBundle bundle) {
  std::vector<SceneOrgan> organs;
  std::vector<const TriangleMesh*> raw;
  for (std::size_t i = 0; i < bundle.meshes.size(); ++i) {
    SceneOrgan o;
    o.id = static_cast<int>(i);
    o.mesh = std::move(bundle.meshes[i].mesh);
    o.appearance = std::move(bundle.meshes[i].appearance);
    o.state.mesh_id = o.id;
    raw.push_back(o.mesh.get());
    organs.push_back(std::move(o));
  }
  const Affine3 model = fit_to_workspace(raw, bundle.volume.get(), scene.room);

  scene.organs = std::move(organs);
  scene.volume = std::move(bundle.volume);
  scene.record = std::move(bundle.record);
  scene.annotations = std::move(bundle.annotations);
  scene.transfer_function = std::move(bundle.transfer_function);
  scene.model = model;
  scene.loaded = true;
  set_view(scene, "coronal");
}

void set_view(Scene& scene, const std::string& view_name) {
  const ViewPreset& preset = scene.views.find(view_name);
  scene.camera = apply_view(scene.room, preset, scene.viewport);
  scene.active_view = view_name;
  update_labels(scene);
}

void orbit(Scene& scene, double yaw_deg, double pitch_deg, double zoom) {
  scene.camera = orbit_camera(scene.camera, scene.room.workspace_center_mm(), yaw_deg, pitch_deg, zoom);
  update_labels(scene);
}

void set_organ_opacity(Scene& scene, int mesh_id, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "organ opacity must lie in [0,1]");
  }
  auto it = std::find_if(scene.organs.begin(), scene.organs.end(),
                         [&](const SceneOrgan& o) { return o.id == mesh_id; });
  if (it == scene.organs.end()) {
    fail(ErrorCode::UnknownMesh, "no organ with id " + std::to_string(mesh_id));
  }
  it->state.opacity_override = alpha;
}

const Annotation& add_annotation(Scene& scene, const Vec3& position, const Vec3& normal,
                                 std::string text) {
  if (!(normal.norm() > 0.0)) fail(ErrorCode::InvalidArgument, "annotation normal is zero");
  int next = 0;
  for (const auto& a : scene.annotations) next = std::max(next, a.id + 1);
  Annotation a;
  a.id = next;
  a.anchor = position;
  a.normal = normal.normalized();
  a.text = std::move(text);
  scene.annotations.push_back(std::move(a));
  update_labels(scene);
  return scene.annotations.back();
}

void update_labels(Scene& scene) {
  std::vector<Vec2> sizes;
  sizes.reserve(scene.annotations.size());
  for (const auto& a : scene.annotations) sizes.push_back(default_label_size(a.text));
  LabelPlacementParams params;
  params.workspace_size = scene.room.workspace_size;
  params.model = scene.model;
  scene.labels = place_labels(scene.annotations, scene.camera, sizes, params);
  for (std::size_t i = 0; i < scene.annotations.size(); ++i) {
    scene.annotations[i].label_distance = scene.labels.distances[i];
  }
}

std::vector<PickTarget> pick_targets(const Scene& scene) {
  std::vector<PickTarget> out;
  for (const auto& o : scene.organs) {
    out.push_back({o.id, o.mesh.get(), scene.model, o.state.visible});
  }
  return out;
}

RenderScene to_render_scene(const Scene& scene) {
  RenderScene rs;
  for (const auto& o : scene.organs) {
    if (!o.state.visible) continue;
    Appearance a = o.appearance;
    a.opacity = o.effective_opacity();
    rs.meshes.push_back({o.mesh, std::move(a), scene.model});
  }
  rs.volume = scene.volume;
  rs.volume_model = scene.model;
  rs.transfer_function = scene.transfer_function;
  rs.lighting = scene.lighting;
  return rs;
}

}  // namespace imhotep
