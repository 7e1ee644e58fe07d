#include "imhotep/scene/picking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imhotep {
namespace {

constexpr int kLeafSize = 4;

bool better(double t, int mesh_id, int tri, const PickHit& best) {
  if (t != best.t) return t < best.t;
  if (mesh_id != best.mesh_id) return mesh_id < best.mesh_id;
  return tri < best.triangle;
}

}  // namespace

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.dir.cross(e2);
  const double det = e1.dot(p);
  if (det == 0.0) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.dir.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (!(t > 0.0)) return std::nullopt;
  return t;
}

MeshPicker::MeshPicker(std::span<const PickTarget> targets) {
  for (const auto& tgt : targets) {
    if (!tgt.visible || !tgt.mesh) continue;
    std::vector<Vec3> world;
    world.reserve(tgt.mesh->vertices.size());
    for (const auto& v : tgt.mesh->vertices) world.push_back(tgt.model * v);
    for (std::size_t i = 0; i < tgt.mesh->triangles.size(); ++i) {
      const auto& t = tgt.mesh->triangles[i];
      tris_.push_back({world[t[0]], world[t[1]], world[t[2]], tgt.id, static_cast<int>(i)});
    }
  }
  if (!tris_.empty()) {
    nodes_.reserve(2 * tris_.size() / kLeafSize + 1);
    build(0, static_cast<int>(tris_.size()));
  }
}

int MeshPicker::build(int first, int count) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Aabb box, centroids;
  for (int i = first; i < first + count; ++i) {
    const Tri& t = tris_[i];
    box.extend(t.a);
    box.extend(t.b);
    box.extend(t.c);
    centroids.extend((t.a + t.b + t.c) / 3.0);
  }
  // Pad so rays grazing flat (axis-aligned) boxes are not culled by rounding.
  const double pad = 1e-9 * (box.extent().norm() + 1.0);
  box.lo -= Vec3::Constant(pad);
  box.hi += Vec3::Constant(pad);
  nodes_[index].box = box;
  if (count <= kLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  int axis = 0;
  centroids.extent().maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(tris_.begin() + first, tris_.begin() + mid, tris_.begin() + first + count,
                   [axis](const Tri& x, const Tri& y) {
                     return (x.a[axis] + x.b[axis] + x.c[axis]) < (y.a[axis] + y.b[axis] + y.c[axis]);
                   });
  const int left = build(first, mid - first);
  const int right = build(mid, first + count - mid);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::optional<PickHit> MeshPicker::pick(const Ray& ray) const {
  if (nodes_.empty()) return std::nullopt;
  PickHit best;
  best.t = std::numeric_limits<double>::infinity();
  bool found = false;

  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    double t0 = 0.0, t1 = 0.0;
    if (!intersect_aabb(ray, node.box, t0, t1) || t1 < 0.0 || t0 > best.t) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const Tri& tri = tris_[static_cast<std::size_t>(i)];
        const auto t = intersect_triangle(ray, tri.a, tri.b, tri.c);
        if (t && (!found || better(*t, tri.mesh_id, tri.index, best))) {
          best = {tri.mesh_id, tri.index, *t, ray.origin + *t * ray.dir};
          found = true;
        }
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  if (!found) return std::nullopt;
  return best;
}

std::optional<PickHit> ray_mesh_pick(std::span<const PickTarget> targets, const Ray& ray) {
  return MeshPicker(targets).pick(ray);
}

}  // namespace imhotep
