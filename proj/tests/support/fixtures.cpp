#include "fixtures.hpp"

#include "dicom_writer.hpp"
#include "imhotep/render/png.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unistd.h>

namespace imhotep::testing {
namespace fs = std::filesystem;

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<int> counter{0};
  for (;;) {
    path_ = fs::temp_directory_path() /
            (prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    if (fs::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

TriangleMesh make_icosphere(int subdivisions, double radius, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]);
      const int b = midpoint(tri[1], tri[2]);
      const int c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  TriangleMesh m;
  for (const auto& p : v) {
    m.vertices.push_back(center + radius * p);
    m.normals.push_back(p);
  }
  m.triangles = std::move(f);
  return m;
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  }
  m.triangles = {{0, 2, 1}, {1, 2, 3},   // -z
                 {4, 5, 6}, {5, 7, 6},   // +z
                 {0, 1, 4}, {1, 5, 4},   // -y
                 {2, 6, 3}, {3, 6, 7},   // +y
                 {0, 4, 2}, {2, 4, 6},   // -x
                 {1, 3, 5}, {3, 7, 5}};  // +x
  m.normals = compute_vertex_normals(m.vertices, m.triangles);
  return m;
}

std::string to_obj(const TriangleMesh& mesh, bool with_normals) {
  std::ostringstream out;
  out.precision(17);
  out << "# generated\n";
  for (const auto& p : mesh.vertices) out << "v " << p.x() << " " << p.y() << " " << p.z() << "\n";
  if (with_normals) {
    for (const auto& n : mesh.normals) out << "vn " << n.x() << " " << n.y() << " " << n.z() << "\n";
  }
  for (const auto& t : mesh.triangles) {
    out << "f";
    for (int c = 0; c < 3; ++c) {
      out << " " << t[c] + 1;
      if (with_normals) out << "//" << t[c] + 1;
    }
    out << "\n";
  }
  return out.str();
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

Volume random_volume(std::array<int, 3> dims, std::mt19937_64& rng, int lo, int hi) {
  std::uniform_real_distribution<double> sp(0.5, 2.0);
  std::uniform_real_distribution<double> off(-20.0, 20.0);
  Volume v = make_volume(dims, Vec3(sp(rng), sp(rng), sp(rng)), Vec3(off(rng), off(rng), off(rng)));
  std::uniform_int_distribution<int> val(lo, hi);
  for (auto& x : v.voxels) x = static_cast<std::int16_t>(val(rng));
  return v;
}

TransferFunction random_transfer_function(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> values;
  while (static_cast<int>(values.size()) < n) {
    const double x = lo + (hi - lo) * unit(rng);
    if (std::find(values.begin(), values.end(), x) == values.end()) values.push_back(x);
  }
  std::sort(values.begin(), values.end());
  TransferFunction tf;
  tf.reference_step = 0.5 + unit(rng);
  for (double x : values) {
    tf.points.push_back({x, Vec4(unit(rng), unit(rng), unit(rng), 0.6 * unit(rng))});
  }
  return tf;
}

void build_fixture_patient(const fs::path& dir, const FixtureOptions& opts) {
  using nlohmann::json;
  fs::create_directories(dir / "meshes");

  // Organs in patient mm (LPS); roughly an abdomen-sized box.
  const TriangleMesh liver = make_icosphere(2, 40.0, Vec3(-30.0, 0.0, 10.0));
  const TriangleMesh kidney = make_box(Vec3(20.0, 10.0, -30.0), Vec3(50.0, 40.0, 20.0));
  const TriangleMesh tumor = make_icosphere(1, 12.0, Vec3(-30.0, -30.0, 10.0));
  write_text(dir / "meshes" / "liver.obj", to_obj(liver, true));
  write_text(dir / "meshes" / "kidney.obj", to_obj(kidney, false));
  write_text(dir / "meshes" / "tumor.obj", to_obj(tumor, true));
  const json manifest = json::array({
      {{"file", "liver.obj"}, {"name", kFixtureOrgans[0]}, {"color", {0.8, 0.3, 0.25}}, {"opacity", 1.0}},
      {{"file", "kidney.obj"}, {"name", kFixtureOrgans[1]}, {"color", {0.9, 0.6, 0.2}}, {"opacity", 0.5}},
      {{"file", "tumor.obj"}, {"name", kFixtureOrgans[2]}, {"color", {0.3, 0.9, 0.3}}, {"opacity", 0.6}},
  });
  write_text(dir / "meshes" / "meshes.json", manifest.dump(2));

  if (opts.with_volume) {
    const int n = opts.volume_size;
    SeriesGeometry g;
    g.dims = {n, n, n};
    const double span = 120.0;
    g.spacing = Vec3(span / (n - 1), span / (n - 1), span / (n - 1));
    g.origin = Vec3(-60.0, -60.0, -50.0);
    g.slope = 1.0;
    g.intercept = -1024.0;
    std::mt19937_64 rng(7);
    SyntheticSeries series = make_series(g, rng);
    // Replace random values by a smooth phantom: soft tissue with a dense
    // blob inside the liver and a bright "bone" rod.
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const Vec3 p = g.origin + Vec3(i * g.spacing.x(), j * g.spacing.y(), k * g.spacing.z());
          double hu = 40.0 - 1040.0 * (p.norm() > 58.0);
          hu += 200.0 * std::exp(-(p - Vec3(-30.0, 0.0, 10.0)).squaredNorm() / (2.0 * 15.0 * 15.0));
          if (std::hypot(p.x() - 30.0, p.y() + 30.0) < 8.0) hu = 900.0;
          const auto raw = static_cast<std::int32_t>(std::lround(hu + 1024.0));
          series.slices[k].raw[static_cast<std::size_t>(j) * n + i] = raw;
        }
      }
    }
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    write_series(series, dir / "dicom", Encoding::ExplicitPart10, order);
  }

  if (opts.with_record) {
    fs::create_directories(dir / "images");
    std::vector<std::uint8_t> px(4 * 4 * 4, 255);
    write_png(dir / "images" / "ct_overview.png", 4, 4, px);
    write_png(dir / "images" / "lesion_detail.png", 4, 4, px);
    const json record = {
        {"name", "Test Patient"},
        {"age", 64},
        {"sex", "F"},
        {"diagnosis", "Hepatocellular carcinoma, segment VIII"},
        {"notes_html", "<p>Lesion <span style=\"color:red\">3.1 cm</span>, no vascular invasion.</p>"},
        {"labs",
         {{{"name", "AFP"}, {"value", 412.0}, {"unit", "ng/mL"}, {"timestamp", "2024-03-01T08:00:00Z"}},
          {{"name", "Bilirubin"}, {"value", 1.1}, {"unit", "mg/dL"}, {"timestamp", "2024-03-01T08:00:00Z"}}}},
        {"images",
         {{{"file", "images/ct_overview.png"}, {"caption", "Portal venous phase"}, {"slot", "image_main"}},
          {{"file", "images/lesion_detail.png"}, {"caption", "Lesion"}, {"slot", "image_left"}}}}};
    write_text(dir / "patient.json", record.dump(2));
  }

  if (opts.with_annotations) {
    const json ann = json::array({
        {{"id", 0}, {"position", {-30.0, -40.0, 10.0}}, {"normal", {0.0, -1.0, 0.0}}, {"text", "Tumor"}},
        {{"id", 1}, {"position", {-30.0, -38.0, 14.0}}, {"normal", {0.0, -1.0, 0.0}}, {"text", "Portal vein"}},
        {{"id", 2}, {"position", {35.0, 10.0, 0.0}}, {"normal", {1.0, 0.0, 0.0}}, {"text", "Kidney"}},
    });
    write_text(dir / "annotations.json", ann.dump(2));
  }

  if (opts.with_transfer) {
    const json tf = {{"reference_step_mm", 2.0},
                     {"points",
                      {{{"value", -1000}, {"rgba", {0.0, 0.0, 0.0, 0.0}}},
                       {{"value", 0}, {"rgba", {0.6, 0.3, 0.25, 0.0}}},
                       {{"value", 150}, {"rgba", {0.9, 0.5, 0.4, 0.08}}},
                       {{"value", 300}, {"rgba", {1.0, 0.9, 0.8, 0.3}}},
                       {{"value", 1000}, {"rgba", {1.0, 1.0, 1.0, 0.9}}}}}};
    write_text(dir / "transfer.json", tf.dump(2));
  }
}

}  // namespace imhotep::testing
