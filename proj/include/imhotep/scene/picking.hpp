#pragma once

#include "imhotep/patient/mesh.hpp"

#include <optional>
#include <span>
#include <vector>

namespace imhotep {

struct PickTarget {
  int id = 0;
  const TriangleMesh* mesh = nullptr;
  Affine3 model = Affine3::Identity();
  bool visible = true;
};

struct PickHit {
  int mesh_id = 0;
  int triangle = 0;
  double t = 0.0;
  Vec3 point = Vec3::Zero();
};

/// Moller-Trumbore intersection; returns t > 0 for a hit.
std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c);

/// Bounding-volume hierarchy over the world-space triangles of the visible
/// targets. Queries return the nearest hit; equal distances resolve to the
/// lower mesh id, then the lower triangle index.
class MeshPicker {
 public:
  explicit MeshPicker(std::span<const PickTarget> targets);

  std::optional<PickHit> pick(const Ray& ray) const;
  std::size_t triangle_count() const { return tris_.size(); }

 private:
  struct Tri {
    Vec3 a, b, c;
    int mesh_id;
    int index;
  };
  struct Node {
    Aabb box;
    int left = -1;  // child indices, -1 for leaves
    int right = -1;
    int first = 0;  // leaf triangle range
    int count = 0;
  };

  int build(int first, int count);

  std::vector<Tri> tris_;
  std::vector<Node> nodes_;
};

std::optional<PickHit> ray_mesh_pick(std::span<const PickTarget> targets, const Ray& ray);

}  // namespace imhotep
