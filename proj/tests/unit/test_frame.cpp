#include "fixtures.hpp"
#include "imhotep/render/frame.hpp"
#include "imhotep/render/png.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

using namespace imhotep;
using namespace imhotep::testing;

namespace {

// Horizontal centroid of the covered pixels.
double centroid_x(const Framebuffer& fb) {
  double sum = 0.0, n = 0.0;
  for (int y = 0; y < fb.height; ++y)
    for (int x = 0; x < fb.width; ++x)
      if (fb.color[4 * fb.pixel(x, y) + 3] > 0) {
        sum += x + 0.5;
        n += 1.0;
      }
  REQUIRE(n > 0.0);
  return sum / n;
}

RenderScene volume_and_meshes(std::mt19937_64& rng) {
  RenderScene s;
  auto v = std::make_shared<Volume>(random_volume({12, 10, 9}, rng));
  v->origin = Vec3(-20, -20, -20);
  v->spacing = Vec3(4, 4, 4);
  s.volume = v;
  s.transfer_function = random_transfer_function(rng, 4);
  s.meshes.push_back({std::make_shared<const TriangleMesh>(make_icosphere(2, 12.0, Vec3(5, 0, 0))),
                      Appearance{"a", Vec3(0.9, 0.2, 0.2), 1.0}, Affine3::Identity()});
  s.meshes.push_back({std::make_shared<const TriangleMesh>(make_box(Vec3(-25, -5, -5), Vec3(-5, 10, 8))),
                      Appearance{"b", Vec3(0.2, 0.9, 0.2), 0.5}, Affine3::Identity()});
  return s;
}

}  // namespace

TEST_SUITE("frame") {
  TEST_CASE("ipd 0 gives identical eyes") {
    std::mt19937_64 rng(1);
    const RenderScene scene = volume_and_meshes(rng);
    StereoRig rig{look_along(Vec3(0, -150, 0), Vec3::UnitY(), Vec3::UnitZ(), 48, 40, 1.0, 1.0, 1e4), 0.0};
    RenderOptions opts;
    opts.workers = 2;
    const StereoFrame f = render_frame(scene, rig, opts);
    CHECK(f.left.color == f.right.color);
    CHECK(f.left.depth == f.right.depth);
  }

  TEST_CASE("eye cameras are shifted along right") {
    StereoRig rig{look_along(Vec3(1, 2, 3), Vec3::UnitY(), Vec3::UnitZ(), 10, 10, 1.0, 1.0, 100.0), 64.0};
    const Camera l = rig.eye_camera(1), r = rig.eye_camera(2), c = rig.eye_camera(0);
    CHECK((r.eye - l.eye - 64.0 * rig.center.right).norm() < 1e-12);
    CHECK((c.eye - rig.center.eye).norm() == 0.0);
    CHECK(l.forward == rig.center.forward);  // parallel axes
  }

  TEST_CASE("landmark disparity follows f * ipd / z") {
    const int w = 256, h = 192;
    const double fov = 1.0;
    const double f_px = (h / 2.0) / std::tan(fov / 2.0);
    const double ipd = 64.0;
    for (double z : {400.0, 800.0, 1600.0}) {
      CAPTURE(z);
      RenderScene scene;
      scene.meshes.push_back({std::make_shared<const TriangleMesh>(make_icosphere(3, z / 200.0, Vec3(0, 0, -z))),
                              Appearance{"dot", Vec3(1, 1, 1), 1.0}, Affine3::Identity()});
      StereoRig rig{look_along(Vec3::Zero(), -Vec3::UnitZ(), Vec3::UnitY(), w, h, fov, 1.0, 1e5), ipd};
      const StereoFrame fr = render_frame(scene, rig);
      const double disparity = centroid_x(fr.left) - centroid_x(fr.right);
      CHECK(std::abs(disparity - f_px * ipd / z) < 1.0);
    }
  }

  TEST_CASE("output does not depend on worker count") {
    std::mt19937_64 rng(2);
    const RenderScene scene = volume_and_meshes(rng);
    const Camera cam = look_along(Vec3(10, -140, 15), Vec3(-0.05, 1, -0.1), Vec3::UnitZ(), 53, 37, 1.1, 1.0, 1e4);
    RenderOptions opts;
    opts.workers = 1;
    const Framebuffer ref = render_view(scene, cam, opts);
    for (int w : {2, 4, 8, 37, 64}) {
      opts.workers = w;
      const Framebuffer fb = render_view(scene, cam, opts);
      CHECK(fb.color == ref.color);
      CHECK(fb.radiance == ref.radiance);
      CHECK(fb.depth == ref.depth);
    }
    // Repeated runs too.
    opts.workers = 3;
    CHECK(render_view(scene, cam, opts).color == render_view(scene, cam, opts).color);
  }

  TEST_CASE("meshes only equals rasterize_meshes") {
    std::mt19937_64 rng(3);
    RenderScene scene = volume_and_meshes(rng);
    scene.volume.reset();
    const Camera cam = look_along(Vec3(0, -140, 0), Vec3::UnitY(), Vec3::UnitZ(), 40, 40, 1.0, 1.0, 1e4);
    const Framebuffer a = render_view(scene, cam);
    const Framebuffer b = rasterize_meshes(scene.meshes, cam, scene.lighting, 1);
    CHECK(a.color == b.color);
    CHECK(a.depth == b.depth);
    CHECK(a.radiance == b.radiance);
  }

  TEST_CASE("opaque mesh stops the volume") {
    // A volume in front of nothing but an opaque wall halfway through: the
    // march must end at the wall depth.
    RenderScene scene;
    auto v = std::make_shared<Volume>(make_volume({11, 11, 11}, Vec3(2, 2, 2), Vec3(-10, -10, -110), 100));
    scene.volume = v;
    scene.transfer_function.points = {{-1000.0, Vec4(1, 1, 1, 0.05)}, {1000.0, Vec4(1, 1, 1, 0.05)}};
    scene.lighting.ka = 1.0;
    scene.lighting.kd = scene.lighting.ks = 0.0;
    const Camera cam = look_along(Vec3::Zero(), -Vec3::UnitZ(), Vec3::UnitY(), 33, 33, 0.5, 1.0, 1e4);
    const Framebuffer open = render_view(scene, cam);
    auto wall = std::make_shared<TriangleMesh>();
    wall->vertices = {Vec3(-50, -50, -95), Vec3(50, -50, -95), Vec3(0, 60, -95)};
    wall->normals.assign(3, Vec3::UnitZ());
    wall->triangles = {{0, 1, 2}};
    scene.meshes.push_back({wall, Appearance{"wall", Vec3(0, 0, 0), 1.0}, Affine3::Identity()});
    const Framebuffer blocked = render_view(scene, cam);
    const std::size_t p = open.pixel(16, 16);
    const double expect_open = 1.0 - std::pow(0.95, 20.0);
    const double expect_blocked = 1.0 - std::pow(0.95, 5.0);
    CHECK(open.radiance[p][3] == doctest::Approx(expect_open).epsilon(1e-9));
    // Volume over the black wall: colour is the 5 mm of volume, alpha 1.
    CHECK(blocked.radiance[p][0] == doctest::Approx(expect_blocked).epsilon(1e-9));
    CHECK(blocked.radiance[p][3] == doctest::Approx(1.0));
  }

  TEST_CASE("png round trip") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> b(0, 255);
    std::vector<std::uint8_t> px(4 * 13 * 7);
    for (auto& x : px) x = static_cast<std::uint8_t>(b(rng));
    const auto png = encode_png(13, 7, px);
    const Image img = decode_png(png);
    CHECK(img.width == 13);
    CHECK(img.height == 7);
    CHECK(img.rgba == px);
    CHECK(encode_png(13, 7, px) == png);
  }
}
