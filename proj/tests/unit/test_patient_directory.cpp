#include "fixtures.hpp"
#include "imhotep/core/error.hpp"
#include "imhotep/patient/patient_directory.hpp"

#include <doctest.h>

#include <filesystem>

using namespace imhotep;
using namespace imhotep::testing;
namespace fs = std::filesystem;

namespace {

void write_two_mesh_dir(const fs::path& dir) {
  fs::create_directories(dir / "meshes");
  write_text(dir / "meshes" / "a.obj", to_obj(make_box(Vec3(0, 0, 0), Vec3(1, 2, 3)), false));
  write_text(dir / "meshes" / "b.obj", to_obj(make_icosphere(1, 5.0, Vec3(10, 0, 0)), true));
  write_text(dir / "meshes" / "meshes.json",
             R"([{"file":"a.obj","name":"A","color":[1,0,0],"opacity":1},
                 {"file":"b.obj","name":"B","color":[0,1,0],"opacity":0.4}])");
}

}  // namespace

TEST_SUITE("patient_directory") {
  TEST_CASE("two meshes and no dicom give an empty volume slot") {
    TempDir dir;
    write_two_mesh_dir(dir.path());
    const PatientBundle b = load_patient_directory(dir.path());
    CHECK(b.volume == nullptr);
    REQUIRE(b.meshes.size() == 2);
    CHECK(b.meshes[0].appearance.name == "A");
    CHECK(b.meshes[1].appearance.name == "B");
    CHECK(b.meshes[1].appearance.opacity == 0.4);
    CHECK(b.meshes[0].mesh->triangles.size() == 12);
    CHECK(b.annotations.empty());
    CHECK(b.record.name.empty());
    CHECK(b.transfer_function.points.size() >= 2);  // default preset
  }

  TEST_CASE("manifest naming a missing file") {
    TempDir dir;
    write_two_mesh_dir(dir.path());
    fs::remove(dir / "meshes/b.obj");
    try {
      load_patient_directory(dir.path());
      FAIL("expected ManifestEntryUnreadable");
    } catch (const EntryError& e) {
      CHECK(e.code() == ErrorCode::ManifestEntryUnreadable);
      CHECK(e.entry() == "meshes/b.obj");
    }
  }

  TEST_CASE("malformed mesh keeps the underlying cause") {
    TempDir dir;
    write_two_mesh_dir(dir.path());
    write_text(dir / "meshes/a.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
    try {
      load_patient_directory(dir.path());
      FAIL("expected ManifestEntryUnreadable");
    } catch (const EntryError& e) {
      CHECK(e.entry() == "meshes/a.obj");
      CHECK(e.cause() == ErrorCode::IndexOutOfRange);
    }
  }

  TEST_CASE("missing manifest or directory") {
    TempDir dir;
    CHECK_THROWS_WITH_AS(load_patient_directory(dir.path()), doctest::Contains("manifest"), Error);
    try {
      load_patient_directory(dir / "nope");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ManifestMissing);
    }
    try {
      load_patient_directory(dir.path());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ManifestMissing);
    }
  }

  TEST_CASE("series from a missing directory") {
    TempDir dir;
    try {
      load_dicom_series(dir / "nope");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }

  TEST_CASE("full fixture populates all five parts") {
    TempDir dir;
    build_fixture_patient(dir.path(), {.volume_size = 12});
    const PatientBundle b = load_patient_directory(dir.path());
    REQUIRE(b.volume);
    CHECK(b.volume->dims == std::array<int, 3>{12, 12, 12});
    CHECK(b.volume->spacing.x() == doctest::Approx(120.0 / 11.0));
    REQUIRE(b.meshes.size() == kFixtureOrgans.size());
    for (std::size_t i = 0; i < kFixtureOrgans.size(); ++i) CHECK(b.meshes[i].appearance.name == kFixtureOrgans[i]);
    CHECK(b.record.name == "Test Patient");
    CHECK(b.record.age == "64");
    REQUIRE(b.record.labs.size() == 2);
    CHECK(b.record.labs[0].name == "AFP");
    CHECK(b.record.labs[0].value == 412.0);
    REQUIRE(b.record.images.size() == 2);
    CHECK(fs::path(b.record.images[0].file).is_absolute());
    CHECK(fs::exists(b.record.images[0].file));
    CHECK(b.record.images[1].slot == "image_left");
    REQUIRE(b.annotations.size() == 3);
    CHECK(b.annotations[1].text == "Portal vein");
    CHECK(b.transfer_function.reference_step == 2.0);
    CHECK(b.transfer_function.points.size() == 5);
  }

  TEST_CASE("record image slots are checked against the layout") {
    TempDir dir;
    build_fixture_patient(dir.path(), {.with_volume = false});
    const std::vector<std::string> slots{"image_main"};
    try {
      load_patient_directory(dir.path(), slots);
      FAIL("expected an error for image_left");
    } catch (const EntryError& e) {
      CHECK(e.entry() == "images/lesion_detail.png");
    }
    const std::vector<std::string> all{"image_main", "image_left"};
    CHECK_NOTHROW(load_patient_directory(dir.path(), all));
  }

  TEST_CASE("missing record image") {
    TempDir dir;
    build_fixture_patient(dir.path(), {.with_volume = false});
    fs::remove(dir / "images/ct_overview.png");
    try {
      load_patient_directory(dir.path());
      FAIL("expected an error");
    } catch (const EntryError& e) {
      CHECK(e.entry() == "images/ct_overview.png");
    }
  }

  TEST_CASE("corrupt dicom slice names the file") {
    TempDir dir;
    build_fixture_patient(dir.path(), {.volume_size = 6});
    write_text(dir / "dicom/slice_003.dcm", "garbage");
    try {
      load_patient_directory(dir.path());
      FAIL("expected an error");
    } catch (const EntryError& e) {
      CHECK(e.entry() == "dicom/slice_003.dcm");
    }
  }

  TEST_CASE("validate reports every file") {
    TempDir dir;
    build_fixture_patient(dir.path(), {.volume_size = 6});
    auto reports = validate_patient_directory(dir.path());
    for (const auto& r : reports) {
      CAPTURE(r.file);
      CHECK(r.ok);
    }
    CHECK(reports.size() >= 1 + 3 + 6 + 1);

    write_text(dir / "dicom/slice_002.dcm", "garbage");
    write_text(dir / "meshes/tumor.obj", "f 1 2 3 4\n");
    reports = validate_patient_directory(dir.path());
    int bad = 0;
    for (const auto& r : reports) {
      if (r.ok) continue;
      ++bad;
      CHECK((r.file == "dicom/slice_002.dcm" || r.file == "meshes/tumor.obj"));
    }
    CHECK(bad == 2);
  }
}
