#include "dicom_writer.hpp"
#include "fixtures.hpp"
#include "imhotep/core/error.hpp"
#include "imhotep/patient/patient_directory.hpp"
#include "imhotep/patient/series.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace imhotep;
using namespace imhotep::testing;

namespace {

std::vector<DicomDataset> parse_all(const SyntheticSeries& s, Encoding enc,
                                    const std::vector<std::size_t>& order) {
  std::vector<DicomDataset> out;
  for (std::size_t i : order) out.push_back(parse_dicom_file(write_slice(s.slices[i], enc)));
  return out;
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

ErrorCode assemble_code(const std::vector<DicomDataset>& ds) {
  try {
    assemble_series(ds);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

SyntheticSeries z_series(const std::vector<double>& zs) {
  std::mt19937_64 rng(3);
  SeriesGeometry g;
  g.dims = {2, 2, static_cast<int>(zs.size())};
  g.spacing = Vec3(1.0, 1.0, 2.0);
  g.origin = Vec3::Zero();
  SyntheticSeries s = make_series(g, rng);
  for (std::size_t k = 0; k < zs.size(); ++k) s.slices[k].position = Vec3(0.0, 0.0, zs[k]);
  return s;
}

}  // namespace

TEST_SUITE("series") {
  TEST_CASE("three slices at z = 0, 2, 4 give sz = 2") {
    const SyntheticSeries s = z_series({0.0, 2.0, 4.0});
    const Volume v = assemble_series(parse_all(s, Encoding::ExplicitPart10, {0, 1, 2}));
    CHECK(v.spacing.z() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v.dims == std::array<int, 3>{2, 2, 3});
    CHECK(v.voxels == s.expected);
  }

  TEST_CASE("input order does not matter") {
    const SyntheticSeries s = z_series({0.0, 2.0, 4.0});
    const Volume sorted = assemble_series(parse_all(s, Encoding::ImplicitPart10, {0, 1, 2}));
    const Volume shuffled = assemble_series(parse_all(s, Encoding::ImplicitPart10, {2, 0, 1}));
    CHECK(shuffled.voxels == sorted.voxels);
    CHECK(shuffled.origin == sorted.origin);
    CHECK(shuffled.spacing == sorted.spacing);
    CHECK(shuffled.orientation == sorted.orientation);
  }

  TEST_CASE("non-uniform gaps") {
    const SyntheticSeries s = z_series({0.0, 2.0, 5.0});
    CHECK(assemble_code(parse_all(s, Encoding::ExplicitPart10, {0, 1, 2})) == ErrorCode::NonUniformSpacing);
    // Within the 1% tolerance is accepted.
    const SyntheticSeries ok = z_series({0.0, 2.0, 4.01});
    CHECK_NOTHROW(assemble_series(parse_all(ok, Encoding::ExplicitPart10, {0, 1, 2})));
  }

  TEST_CASE("duplicate positions") {
    const SyntheticSeries s = z_series({0.0, 0.0, 0.0});
    CHECK(assemble_code(parse_all(s, Encoding::ExplicitPart10, {0, 1, 2})) == ErrorCode::NonUniformSpacing);
  }

  TEST_CASE("single slice") {
    const SyntheticSeries s = z_series({0.0, 2.0});
    CHECK(assemble_code(parse_all(s, Encoding::ExplicitPart10, {0})) == ErrorCode::SingleSlice);
    CHECK(assemble_code({}) == ErrorCode::SingleSlice);
  }

  TEST_CASE("mismatched in-plane attributes") {
    SyntheticSeries s = z_series({0.0, 2.0, 4.0});
    s.slices[1].row_spacing = 0.9;
    CHECK(assemble_code(parse_all(s, Encoding::ExplicitPart10, {0, 1, 2})) == ErrorCode::InconsistentGeometry);

    SyntheticSeries t = z_series({0.0, 2.0, 4.0});
    t.slices[2].row_direction = Vec3(0.0, 1.0, 0.0);
    t.slices[2].column_direction = Vec3(1.0, 0.0, 0.0);
    CHECK(assemble_code(parse_all(t, Encoding::ExplicitPart10, {0, 1, 2})) == ErrorCode::InconsistentGeometry);
  }

  TEST_CASE("non-orthogonal orientation") {
    SyntheticSeries s = z_series({0.0, 2.0, 4.0});
    for (auto& sl : s.slices) sl.column_direction = Vec3(0.6, 0.8, 0.0);
    CHECK(assemble_code(parse_all(s, Encoding::ExplicitPart10, {0, 1, 2})) == ErrorCode::InconsistentGeometry);
  }

  TEST_CASE("HU rescale: raw 100, slope 1, intercept -1024 -> -924") {
    SyntheticSeries s = z_series({0.0, 1.0});
    for (auto& sl : s.slices) {
      sl.intercept = -1024.0;
      sl.slope = 1.0;
      std::fill(sl.raw.begin(), sl.raw.end(), 100);
    }
    const Volume v = assemble_series(parse_all(s, Encoding::ExplicitPart10, {0, 1}));
    for (auto x : v.voxels) CHECK(x == -924);
  }

  TEST_CASE("rescale rounds half away from zero and saturates") {
    SyntheticSeries s = z_series({0.0, 1.0});
    for (auto& sl : s.slices) {
      sl.slope = 0.5;
      sl.intercept = 0.0;
      sl.raw = {1, -1, 3, 30000};
    }
    s.slices[1].slope = 0.5;
    const Volume v = assemble_series(parse_all(s, Encoding::ExplicitPart10, {0, 1}));
    CHECK(v.at(0, 0, 0) == 1);    // 0.5 -> 1
    CHECK(v.at(1, 0, 0) == -1);   // -0.5 -> -1
    CHECK(v.at(0, 1, 0) == 2);    // 1.5 -> 2
    CHECK(v.at(1, 1, 0) == 15000);

    for (auto& sl : s.slices) {
      sl.slope = 4.0;
      sl.raw = {30000, -30000, 0, 0};
    }
    const Volume sat = assemble_series(parse_all(s, Encoding::ExplicitPart10, {0, 1}));
    CHECK(sat.at(0, 0, 0) == 32767);
    CHECK(sat.at(1, 0, 0) == -32768);
  }

  TEST_CASE("round trip over random geometries and orders") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 6; ++trial) {
      SeriesGeometry g;
      std::uniform_int_distribution<int> dim(2, 7);
      std::uniform_real_distribution<double> sp(0.3, 3.0);
      g.dims = {dim(rng), dim(rng), dim(rng)};
      g.spacing = Vec3(sp(rng), sp(rng), sp(rng));
      g.origin = Vec3(sp(rng) * 10, -sp(rng) * 10, sp(rng) * 5);
      g.orientation = trial == 0 ? Mat3::Identity() : random_rotation(rng);
      g.slope = trial % 2 ? 1.0 : 2.0;
      const SyntheticSeries s = make_series(g, rng);
      auto order = identity(s.slices.size());
      std::shuffle(order.begin(), order.end(), rng);
      const Encoding enc = trial % 3 == 0 ? Encoding::ImplicitPart10
                          : trial % 3 == 1 ? Encoding::ExplicitPart10
                                           : Encoding::ImplicitHeaderless;
      const Volume v = assemble_series(parse_all(s, enc, order));
      CHECK(v.dims == g.dims);
      CHECK(v.voxels == s.expected);
      CHECK((v.spacing - g.spacing).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((v.origin - g.origin).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((v.orientation.transpose() * v.orientation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(v.voxels.size() == v.voxel_count());
    }
  }

  TEST_CASE("series written to disk loads through the directory loader") {
    TempDir dir;
    std::mt19937_64 rng(5);
    SeriesGeometry g;
    const SyntheticSeries s = make_series(g, rng);
    write_series(s, dir.path(), Encoding::ExplicitPart10, {2, 0, 1});
    const Volume v = load_dicom_series(dir.path());
    CHECK(v.voxels == s.expected);
  }
}
