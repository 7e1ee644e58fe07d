#pragma once

#include "imhotep/core/geometry.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace imhotep {

/// Indexed organ surface in patient millimetres, one unit normal per vertex.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<std::array<int, 3>> triangles;

  Aabb bounds() const;
  void validate() const;
};

struct Appearance {
  std::string name;
  Vec3 color = Vec3::Constant(0.8);
  double opacity = 1.0;

  void validate() const;
};

/// Parses the OBJ-style subset: `v x y z`, `vn x y z`, `f a b c` where each
/// corner is `i`, `i//n`, `i/t` or `i/t/n` with 1-based indices. Lines
/// starting with `#` and the grouping/material keywords (o, g, s, vt,
/// usemtl, mtllib) are ignored. Vertices without a referenced normal get the
/// area-weighted average of their incident face normals.
TriangleMesh load_mesh(std::string_view text);

/// Area-weighted per-vertex normals for a triangle soup. Vertices touched
/// by no (non-degenerate) triangle receive +z.
std::vector<Vec3> compute_vertex_normals(const std::vector<Vec3>& vertices,
                                         const std::vector<std::array<int, 3>>& triangles);

}  // namespace imhotep
