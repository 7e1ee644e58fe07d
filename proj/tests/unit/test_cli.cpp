#include "fixtures.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <sys/wait.h>

using namespace imhotep::testing;
namespace fs = std::filesystem;

#ifdef IMHOTEP_CLI_PATH

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args, const fs::path& capture) {
  const std::string cmd = std::string("\"") + IMHOTEP_CLI_PATH + "\" " + args + " > \"" + capture.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  r.out.assign(std::istreambuf_iterator<char>(in), {});
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("render is byte-identical across runs and worker counts") {
    TempDir dir;
    build_fixture_patient(dir / "patient", {.volume_size = 16});
    const std::string base = "render --patient \"" + (dir / "patient").string() + "\" --size 64x48 ";
    REQUIRE(run_cli(base + "--workers 1 --out \"" + (dir / "a").string() + "\"", dir / "log").code == 0);
    REQUIRE(run_cli(base + "--workers 1 --out \"" + (dir / "b").string() + "\"", dir / "log").code == 0);
    REQUIRE(run_cli(base + "--workers 8 --out \"" + (dir / "c").string() + "\"", dir / "log").code == 0);
    const std::string a = slurp(dir / "a.png");
    CHECK(a.size() > 8);
    CHECK(a.substr(1, 3) == "PNG");
    CHECK(a == slurp(dir / "b.png"));
    CHECK(a == slurp(dir / "c.png"));
  }

  TEST_CASE("stereo render writes a left and right image") {
    TempDir dir;
    build_fixture_patient(dir / "patient", {.volume_size = 8});
    const Run r = run_cli("render --patient \"" + (dir / "patient").string() +
                              "\" --size 32x32 --stereo --ipd 64 --view sagittal --out \"" + (dir / "s").string() + "\"",
                          dir / "log");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "s_left.png"));
    CHECK(fs::exists(dir / "s_right.png"));
    CHECK_FALSE(fs::exists(dir / "s.png"));
  }

  TEST_CASE("validate reports the corrupt file") {
    TempDir dir;
    build_fixture_patient(dir / "patient", {.volume_size = 8});
    CHECK(run_cli("validate \"" + (dir / "patient").string() + "\"", dir / "log").code == 0);
    write_text(dir / "patient/dicom/slice_003.dcm", "garbage");
    const Run r = run_cli("validate \"" + (dir / "patient").string() + "\"", dir / "log");
    CHECK(r.code == 1);
    CHECK(r.out.find("ERROR dicom/slice_003.dcm") != std::string::npos);
  }

  TEST_CASE("data errors exit 1, argument errors exit 2") {
    TempDir dir;
    build_fixture_patient(dir / "patient", {.volume_size = 8});
    const std::string patient = "--patient \"" + (dir / "patient").string() + "\" ";
    const std::string out = "--out \"" + (dir / "x").string() + "\" ";
    CHECK(run_cli("render " + patient + out + "--view oblique --size 8x8", dir / "log").code == 2);
    CHECK(run_cli("render " + patient + out + "--size 0x8", dir / "log").code == 2);
    CHECK(run_cli("render " + patient + out + "--size big", dir / "log").code == 2);
    CHECK(run_cli("render " + patient, dir / "log").code == 2);  // --out missing
    CHECK(run_cli("", dir / "log").code == 2);
    CHECK(run_cli("frobnicate", dir / "log").code == 2);
    CHECK(run_cli("serve --port 99999", dir / "log").code == 2);
    write_text(dir / "patient/dicom/slice_002.dcm", "garbage");
    const Run corrupt = run_cli("render " + patient + out + "--size 8x8", dir / "log");
    CHECK(corrupt.code == 1);
    CHECK(corrupt.out.find("slice_002.dcm") != std::string::npos);
    write_text(dir / "patient/meshes/meshes.json", "{");
    CHECK(run_cli("render " + patient + out + "--size 8x8", dir / "log").code == 1);
  }

  TEST_CASE("help exits cleanly") {
    TempDir dir;
    const Run r = run_cli("--help", dir / "log");
    CHECK(r.code == 0);
    CHECK(r.out.find("render") != std::string::npos);
  }
}

#endif
