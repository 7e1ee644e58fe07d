#pragma once

#include "imhotep/patient/mesh.hpp"
#include "imhotep/render/camera.hpp"
#include "imhotep/render/framebuffer.hpp"
#include "imhotep/render/shading.hpp"

#include <memory>
#include <vector>

namespace imhotep {

struct MeshInstance {
  std::shared_ptr<const TriangleMesh> mesh;
  Appearance appearance;  // effective colour and opacity for this frame
  Affine3 model = Affine3::Identity();
};

/// Meshes transformed into camera space once per frame, shared read-only by
/// every band worker.
class PreparedMeshes {
 public:
  PreparedMeshes(const std::vector<MeshInstance>& meshes, const Camera& cam);

  struct Item {
    std::vector<Vec3> view_positions;  // (right, up, forward) coordinates
    std::vector<Vec3> world_normals;
    const TriangleMesh* mesh = nullptr;
    Vec3 color = Vec3::Zero();
    double opacity = 1.0;
    double centroid_depth = 0.0;
  };

  const std::vector<Item>& items() const { return items_; }
  /// Indices of translucent items, farthest centroid first.
  const std::vector<std::size_t>& translucent_order() const { return translucent_; }
  const Camera& camera() const { return cam_; }

 private:
  Camera cam_;
  std::vector<Item> items_;
  std::vector<std::size_t> translucent_;
};

/// Opaque pass over rows [y0, y1): depth-tested, writes radiance and depth.
void rasterize_opaque_rows(const PreparedMeshes& prepared, const LightingParams& lp,
                           Framebuffer& fb, int y0, int y1);

/// Translucent pass over rows [y0, y1): each translucent mesh contributes its
/// nearest fragment in front of the opaque depth, blended back-to-front
/// without depth writes.
void blend_translucent_rows(const PreparedMeshes& prepared, const LightingParams& lp,
                            Framebuffer& fb, int y0, int y1);

/// Both passes over the full image. Throws DegenerateTransform for a
/// non-invertible model matrix.
Framebuffer rasterize_meshes(const std::vector<MeshInstance>& meshes, const Camera& cam,
                             const LightingParams& lp = {}, int workers = 1);

}  // namespace imhotep
