#include "imhotep/render/rasterizer.hpp"

#include "imhotep/core/error.hpp"
#include "imhotep/render/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imhotep {
namespace {

struct ClipVertex {
  Vec3 pos;     // view space
  Vec3 normal;  // world space
};

struct ScreenVertex {
  double x, y, inv_z;
  Vec3 normal;
};

using Polygon = std::vector<ClipVertex>;

Polygon clip_plane(const Polygon& in, double plane_z, bool keep_greater) {
  Polygon out;
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ClipVertex& a = in[i];
    const ClipVertex& b = in[(i + 1) % n];
    const double da = keep_greater ? a.pos.z() - plane_z : plane_z - a.pos.z();
    const double db = keep_greater ? b.pos.z() - plane_z : plane_z - b.pos.z();
    if (da >= 0.0) out.push_back(a);
    if ((da >= 0.0) != (db >= 0.0)) {
      const double t = da / (da - db);
      out.push_back({a.pos + t * (b.pos - a.pos), a.normal + t * (b.normal - a.normal)});
    }
  }
  return out;
}

/// Edge ownership for pixel centres exactly on an edge; for two triangles
/// sharing an edge exactly one of them owns it.
bool owns_edge(double ex, double ey) { return ey > 0.0 || (ey == 0.0 && ex < 0.0); }

/// Calls `fragment(pixel_index, view_z, interpolated_normal, pixel_x, pixel_y)`
/// for every covered pixel of item `it` within rows [y0, y1).
template <typename Fragment>
void scan_item(const PreparedMeshes::Item& it, const Camera& cam, int y0, int y1,
               Fragment&& fragment) {
  const double f = cam.focal_px();
  const double cx = 0.5 * cam.width, cy = 0.5 * cam.height;
  Polygon poly;
  for (const auto& tri : it.mesh->triangles) {
    poly.clear();
    bool all_in = true;
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = it.view_positions[tri[k]];
      poly.push_back({p, it.world_normals[tri[k]]});
      all_in = all_in && p.z() >= cam.near_plane && p.z() <= cam.far_plane;
    }
    if (!all_in) {
      poly = clip_plane(poly, cam.near_plane, true);
      if (poly.size() < 3) continue;
      poly = clip_plane(poly, cam.far_plane, false);
      if (poly.size() < 3) continue;
    }

    std::vector<ScreenVertex> sv;
    sv.reserve(poly.size());
    for (const auto& v : poly) {
      sv.push_back({cx + f * v.pos.x() / v.pos.z(), cy - f * v.pos.y() / v.pos.z(),
                    1.0 / v.pos.z(), v.normal});
    }

    for (std::size_t k = 1; k + 1 < sv.size(); ++k) {
      ScreenVertex a = sv[0], b = sv[k], c = sv[k + 1];
      double area = (c.x - a.x) * (b.y - a.y) - (c.y - a.y) * (b.x - a.x);
      if (area == 0.0) continue;
      if (area < 0.0) {
        std::swap(b, c);
        area = -area;
      }
      const int px0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}) - 0.5)));
      const int px1 = std::min(cam.width - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}) - 0.5)));
      const int py0 = std::max(y0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}) - 0.5)));
      const int py1 = std::min(y1 - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}) - 0.5)));
      if (px0 > px1 || py0 > py1) continue;

      auto edge = [](const ScreenVertex& p, const ScreenVertex& q, double x, double y) {
        return (x - p.x) * (q.y - p.y) - (y - p.y) * (q.x - p.x);
      };
      for (int py = py0; py <= py1; ++py) {
        const double y = py + 0.5;
        for (int px = px0; px <= px1; ++px) {
          const double x = px + 0.5;
          const double wa = edge(b, c, x, y);
          const double wb = edge(c, a, x, y);
          const double wc = edge(a, b, x, y);
          if (wa < 0.0 || wb < 0.0 || wc < 0.0) continue;
          if (wa == 0.0 && !owns_edge(c.x - b.x, c.y - b.y)) continue;
          if (wb == 0.0 && !owns_edge(a.x - c.x, a.y - c.y)) continue;
          if (wc == 0.0 && !owns_edge(b.x - a.x, b.y - a.y)) continue;

          const double la = wa / area * a.inv_z;
          const double lb = wb / area * b.inv_z;
          const double lc = wc / area * c.inv_z;
          const double inv_z = la + lb + lc;
          const double z = 1.0 / inv_z;
          if (z < cam.near_plane || z > cam.far_plane) continue;
          const Vec3 n = (la * a.normal + lb * b.normal + lc * c.normal) / inv_z;
          fragment(static_cast<std::size_t>(py) * cam.width + px, z, n, px, py);
        }
      }
    }
  }
}

Vec3 shade_fragment(const Camera& cam, const Vec3& color, Vec3 n, int px, int py,
                    const LightingParams& lp) {
  const Vec3 view_dir = -cam.pixel_ray(px, py).dir;
  const double len = n.norm();
  n = len > 0.0 ? Vec3(n / len) : view_dir;
  if (n.dot(view_dir) < 0.0) n = -n;
  return shade_blinn_phong(color, n, view_dir, view_dir, lp);
}

}  // namespace

PreparedMeshes::PreparedMeshes(const std::vector<MeshInstance>& meshes, const Camera& cam)
    : cam_(cam) {
  cam_.validate();
  for (const auto& inst : meshes) {
    const Eigen::Matrix3d lin = inst.model.linear();
    if (std::abs(lin.determinant()) < 1e-12) {
      fail(ErrorCode::DegenerateTransform, "model transform for '" + inst.appearance.name +
                                               "' is not invertible");
    }
    if (!inst.mesh || inst.appearance.opacity <= 0.0) {
      items_.push_back({});
      continue;
    }
    const Eigen::Matrix3d normal_matrix = lin.inverse().transpose();
    Item it;
    it.mesh = inst.mesh.get();
    it.color = inst.appearance.color;
    it.opacity = std::min(inst.appearance.opacity, 1.0);
    it.view_positions.reserve(inst.mesh->vertices.size());
    it.world_normals.reserve(inst.mesh->normals.size());
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : inst.mesh->vertices) {
      const Vec3 w = inst.model * v;
      centroid += w;
      const Vec3 d = w - cam_.eye;
      it.view_positions.emplace_back(d.dot(cam_.right), d.dot(cam_.up), d.dot(cam_.forward));
    }
    for (const auto& n : inst.mesh->normals) it.world_normals.push_back((normal_matrix * n).normalized());
    if (!inst.mesh->vertices.empty()) {
      centroid /= static_cast<double>(inst.mesh->vertices.size());
      it.centroid_depth = (centroid - cam_.eye).dot(cam_.forward);
    }
    items_.push_back(std::move(it));
  }
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].mesh && items_[i].opacity < 1.0) translucent_.push_back(i);
  }
  std::stable_sort(translucent_.begin(), translucent_.end(), [&](std::size_t a, std::size_t b) {
    return items_[a].centroid_depth > items_[b].centroid_depth;
  });
}

void rasterize_opaque_rows(const PreparedMeshes& prepared, const LightingParams& lp,
                           Framebuffer& fb, int y0, int y1) {
  const Camera& cam = prepared.camera();
  for (const auto& it : prepared.items()) {
    if (!it.mesh || it.opacity < 1.0) continue;
    scan_item(it, cam, y0, y1, [&](std::size_t p, double z, const Vec3& n, int px, int py) {
      if (!(z < fb.depth[p])) return;
      const Vec3 c = shade_fragment(cam, it.color, n, px, py, lp);
      fb.depth[p] = z;
      fb.radiance[p] = {c.x(), c.y(), c.z(), 1.0};
    });
  }
}

void blend_translucent_rows(const PreparedMeshes& prepared, const LightingParams& lp,
                            Framebuffer& fb, int y0, int y1) {
  const Camera& cam = prepared.camera();
  const std::size_t first = static_cast<std::size_t>(y0) * cam.width;
  const std::size_t count = static_cast<std::size_t>(y1 - y0) * cam.width;
  std::vector<double> layer_z;
  std::vector<Vec3> layer_color;
  for (std::size_t idx : prepared.translucent_order()) {
    const auto& it = prepared.items()[idx];
    layer_z.assign(count, kDepthInfinity);
    layer_color.assign(count, Vec3::Zero());
    scan_item(it, cam, y0, y1, [&](std::size_t p, double z, const Vec3& n, int px, int py) {
      if (!(z < fb.depth[p])) return;
      const std::size_t local = p - first;
      if (!(z < layer_z[local])) return;
      layer_z[local] = z;
      layer_color[local] = shade_fragment(cam, it.color, n, px, py, lp);
    });
    const double a = it.opacity;
    for (std::size_t local = 0; local < count; ++local) {
      if (layer_z[local] == kDepthInfinity) continue;
      Rgba& dst = fb.radiance[first + local];
      const Vec3& c = layer_color[local];
      dst = {a * c.x() + (1.0 - a) * dst[0], a * c.y() + (1.0 - a) * dst[1],
             a * c.z() + (1.0 - a) * dst[2], a + (1.0 - a) * dst[3]};
    }
  }
}

Framebuffer rasterize_meshes(const std::vector<MeshInstance>& meshes, const Camera& cam,
                             const LightingParams& lp, int workers) {
  const PreparedMeshes prepared(meshes, cam);
  Framebuffer fb(cam.width, cam.height);
  parallel_rows(cam.height, workers, [&](int y0, int y1) {
    rasterize_opaque_rows(prepared, lp, fb, y0, y1);
    blend_translucent_rows(prepared, lp, fb, y0, y1);
    fb.quantize_rows(y0, y1);
  });
  return fb;
}

}  // namespace imhotep
