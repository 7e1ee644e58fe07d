#pragma once

// Synthetic meshes, volumes and patient directories for tests.

#include "imhotep/patient/mesh.hpp"
#include "imhotep/volume/transfer_function.hpp"
#include "imhotep/volume/volume.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace imhotep::testing {

/// Unique directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "imhotep");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Closed triangulated sphere (subdivided icosahedron), outward normals.
TriangleMesh make_icosphere(int subdivisions, double radius, const Vec3& center);

/// Axis-aligned box with 12 triangles, counter-clockwise seen from outside.
TriangleMesh make_box(const Vec3& lo, const Vec3& hi);

/// OBJ text in the loader's format; normals written when requested.
std::string to_obj(const TriangleMesh& mesh, bool with_normals);

void write_text(const std::filesystem::path& p, const std::string& text);

/// 8x8x8-style random volume with values spread over [lo, hi].
Volume random_volume(std::array<int, 3> dims, std::mt19937_64& rng, int lo = -1000, int hi = 1000);

/// Random transfer function with `n` strictly increasing control points.
TransferFunction random_transfer_function(std::mt19937_64& rng, int n, double lo = -1000, double hi = 1000);

struct FixtureOptions {
  bool with_volume = true;
  bool with_record = true;
  bool with_annotations = true;
  bool with_transfer = true;
  int volume_size = 24;   // voxels per axis
};

/// Manifest organ names of the standard fixture, in manifest order.
inline const std::vector<std::string> kFixtureOrgans{"Liver", "Kidney", "Tumor"};

/// Writes a complete patient directory: a CT series with two blobs in a
/// soft-tissue background, three organ meshes (liver opaque, kidney and
/// tumour translucent), a record with labs and two images, annotations and
/// a transfer function.
void build_fixture_patient(const std::filesystem::path& dir, const FixtureOptions& opts = {});

}  // namespace imhotep::testing
