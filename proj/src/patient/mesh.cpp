#include "imhotep/patient/mesh.hpp"

#include "imhotep/core/error.hpp"

#include <charconv>
#include <cmath>
#include <optional>

namespace imhotep {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(ErrorCode::MalformedLine, where(line_no) + "bad number '" + std::string(s) + "'");
  }
  return v;
}

long parse_index(std::string_view s, std::size_t line_no) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorCode::MalformedLine, where(line_no) + "bad index '" + std::string(s) + "'");
  }
  return v;
}

Vec3 parse_vec3(const std::vector<std::string_view>& tok, std::size_t line_no) {
  if (tok.size() != 4) {
    fail(ErrorCode::MalformedLine, where(line_no) + "expected 3 coordinates");
  }
  return Vec3(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
              parse_double(tok[3], line_no));
}

struct Corner {
  long vertex = 0;
  std::optional<long> normal;
};

Corner parse_corner(std::string_view s, std::size_t line_no) {
  Corner c;
  const std::size_t slash = s.find('/');
  c.vertex = parse_index(s.substr(0, slash), line_no);
  if (slash == std::string_view::npos) return c;
  const std::size_t slash2 = s.find('/', slash + 1);
  if (slash2 == std::string_view::npos) return c;  // i/t
  std::string_view n = s.substr(slash2 + 1);
  if (!n.empty()) c.normal = parse_index(n, line_no);
  return c;
}

}  // namespace

Aabb TriangleMesh::bounds() const {
  Aabb b;
  for (const auto& v : vertices) b.extend(v);
  return b;
}

void TriangleMesh::validate() const {
  if (triangles.empty()) fail(ErrorCode::MalformedLine, "mesh has no triangles");
  if (normals.size() != vertices.size()) {
    fail(ErrorCode::InvalidArgument, "mesh needs exactly one normal per vertex");
  }
  const int n = static_cast<int>(vertices.size());
  for (const auto& t : triangles) {
    for (int idx : t) {
      if (idx < 0 || idx >= n) fail(ErrorCode::IndexOutOfRange, "triangle index out of range");
    }
  }
  for (const auto& nrm : normals) {
    if (std::abs(nrm.norm() - 1.0) > 1e-4) fail(ErrorCode::InvalidArgument, "normal not unit length");
  }
}

void Appearance::validate() const {
  if (name.empty()) fail(ErrorCode::InvalidArgument, "appearance name is empty");
  for (int c = 0; c < 3; ++c) {
    if (!(color[c] >= 0.0 && color[c] <= 1.0)) {
      fail(ErrorCode::InvalidArgument, "appearance color channel outside [0,1]");
    }
  }
  if (!(opacity >= 0.0 && opacity <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "appearance opacity outside [0,1]");
  }
}

std::vector<Vec3> compute_vertex_normals(const std::vector<Vec3>& vertices,
                                         const std::vector<std::array<int, 3>>& triangles) {
  std::vector<Vec3> acc(vertices.size(), Vec3::Zero());
  for (const auto& t : triangles) {
    // Unnormalised cross product: length is twice the triangle area.
    const Vec3 face = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    for (int idx : t) acc[idx] += face;
  }
  for (auto& n : acc) {
    const double len = n.norm();
    n = len > 0.0 ? Vec3(n / len) : Vec3::UnitZ();
  }
  return acc;
}

TriangleMesh load_mesh(std::string_view text) {
  TriangleMesh mesh;
  std::vector<Vec3> file_normals;
  std::vector<std::optional<long>> vertex_normal_ref;
  std::vector<std::array<Corner, 3>> faces;

  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string_view kw = tok[0];

    if (kw == "v") {
      mesh.vertices.push_back(parse_vec3(tok, line_no));
    } else if (kw == "vn") {
      file_normals.push_back(parse_vec3(tok, line_no));
    } else if (kw == "f") {
      if (tok.size() < 4) fail(ErrorCode::MalformedLine, where(line_no) + "face needs 3 corners");
      if (tok.size() > 4) {
        fail(ErrorCode::NonTriangleFace,
             where(line_no) + "face has " + std::to_string(tok.size() - 1) + " corners");
      }
      faces.push_back({parse_corner(tok[1], line_no), parse_corner(tok[2], line_no),
                       parse_corner(tok[3], line_no)});
      for (const auto& c : faces.back()) {
        if (c.vertex < 1) {
          fail(ErrorCode::IndexOutOfRange, where(line_no) + "vertex index " +
                                               std::to_string(c.vertex) + " is not 1-based");
        }
      }
    } else if (kw == "o" || kw == "g" || kw == "s" || kw == "vt" || kw == "usemtl" ||
               kw == "mtllib") {
      continue;
    } else {
      fail(ErrorCode::MalformedLine, where(line_no) + "unknown keyword '" + std::string(kw) + "'");
    }
    if (end == text.size()) break;
  }

  if (faces.empty()) fail(ErrorCode::MalformedLine, "mesh has no faces");

  const long nv = static_cast<long>(mesh.vertices.size());
  const long nn = static_cast<long>(file_normals.size());
  vertex_normal_ref.assign(mesh.vertices.size(), std::nullopt);
  mesh.triangles.reserve(faces.size());
  for (const auto& f : faces) {
    std::array<int, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      if (f[k].vertex > nv) {
        fail(ErrorCode::IndexOutOfRange, "face references vertex " + std::to_string(f[k].vertex) +
                                             " of " + std::to_string(nv));
      }
      tri[k] = static_cast<int>(f[k].vertex - 1);
      if (f[k].normal) {
        if (*f[k].normal < 1 || *f[k].normal > nn) {
          fail(ErrorCode::IndexOutOfRange, "face references normal " +
                                               std::to_string(*f[k].normal) + " of " +
                                               std::to_string(nn));
        }
        vertex_normal_ref[tri[k]] = *f[k].normal - 1;
      }
    }
    mesh.triangles.push_back(tri);
  }

  mesh.normals = compute_vertex_normals(mesh.vertices, mesh.triangles);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!vertex_normal_ref[i]) continue;
    const Vec3& n = file_normals[static_cast<std::size_t>(*vertex_normal_ref[i])];
    if (n.norm() > 0.0) mesh.normals[i] = n.normalized();
  }
  mesh.validate();
  return mesh;
}

}  // namespace imhotep
