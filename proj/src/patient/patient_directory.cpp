#include "imhotep/patient/patient_directory.hpp"

#include "imhotep/core/error.hpp"
#include "imhotep/patient/series.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace imhotep {
namespace fs = std::filesystem;
namespace {

std::string read_text(const fs::path& p, const std::string& entry) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw EntryError(entry, ErrorCode::ManifestEntryUnreadable, entry + ": file not found");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& p, const std::string& entry) {
  const std::string text = read_text(p, entry);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw EntryError(entry, ErrorCode::InvalidArgument, entry + ": invalid JSON: " + e.what());
  }
}

/// Runs `fn`, re-raising any failure as an EntryError naming `entry`.
template <typename Fn>
auto guarded(const std::string& entry, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const EntryError&) {
    throw;
  } catch (const Error& e) {
    throw EntryError(entry, e.code(), entry + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw EntryError(entry, ErrorCode::InvalidArgument, entry + ": " + e.what());
  }
}

Vec3 color_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::InvalidArgument, "color must be [r, g, b]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string relative_name(const fs::path& p, const fs::path& root) {
  return fs::relative(p, root).generic_string();
}

struct ManifestEntry {
  std::string file;
  Appearance appearance;
};

std::vector<ManifestEntry> read_manifest(const fs::path& dir) {
  const fs::path manifest = dir / "meshes" / "meshes.json";
  if (!fs::exists(manifest)) {
    fail(ErrorCode::ManifestMissing, "mesh manifest not found: " + manifest.string());
  }
  const std::string entry = "meshes/meshes.json";
  return guarded(entry, [&] {
    const nlohmann::json j = read_json(manifest, entry);
    if (!j.is_array()) fail(ErrorCode::InvalidArgument, "manifest must be a JSON array");
    std::vector<ManifestEntry> out;
    for (const auto& e : j) {
      ManifestEntry m;
      m.file = e.at("file").get<std::string>();
      m.appearance.name = e.at("name").get<std::string>();
      m.appearance.color = color_from(e.at("color"));
      m.appearance.opacity = e.at("opacity").get<double>();
      m.appearance.validate();
      out.push_back(std::move(m));
    }
    return out;
  });
}

}  // namespace

PatientRecord patient_record_from_json(const nlohmann::json& j) {
  PatientRecord r;
  r.name = j.value("name", "");
  r.age = j.contains("age") && j["age"].is_number() ? std::to_string(j["age"].get<int>())
                                                    : j.value("age", "");
  r.sex = j.value("sex", "");
  r.diagnosis = j.value("diagnosis", "");
  r.notes_html = j.value("notes_html", "");
  for (const auto& l : j.value("labs", nlohmann::json::array())) {
    r.labs.push_back({l.at("name").get<std::string>(), l.at("value").get<double>(),
                      l.value("unit", ""), l.value("timestamp", "")});
  }
  for (const auto& im : j.value("images", nlohmann::json::array())) {
    r.images.push_back({im.at("file").get<std::string>(), im.value("caption", ""),
                        im.at("slot").get<std::string>()});
  }
  return r;
}

nlohmann::json to_json(const PatientRecord& r) {
  nlohmann::json labs = nlohmann::json::array();
  for (const auto& l : r.labs) {
    labs.push_back({{"name", l.name}, {"value", l.value}, {"unit", l.unit}, {"timestamp", l.timestamp}});
  }
  nlohmann::json images = nlohmann::json::array();
  for (const auto& im : r.images) {
    images.push_back({{"file", im.file}, {"caption", im.caption}, {"slot", im.slot}});
  }
  return {{"name", r.name},         {"age", r.age},
          {"sex", r.sex},           {"diagnosis", r.diagnosis},
          {"notes_html", r.notes_html}, {"labs", std::move(labs)},
          {"images", std::move(images)}};
}

Volume load_dicom_series(const fs::path& dicom_dir) {
  if (!fs::is_directory(dicom_dir)) {
    fail(ErrorCode::InvalidArgument, "series directory not found: " + dicom_dir.string());
  }
  std::vector<DicomDataset> slices;
  for (const auto& f : sorted_files(dicom_dir)) slices.push_back(read_dicom_file(f.string()));
  return assemble_series(slices);
}

PatientBundle load_patient_directory(const fs::path& dir, std::span<const std::string> slot_ids) {
  if (!fs::is_directory(dir)) {
    fail(ErrorCode::ManifestMissing, "patient directory not found: " + dir.string());
  }
  PatientBundle bundle;

  for (const auto& m : read_manifest(dir)) {
    const std::string entry = "meshes/" + m.file;
    auto mesh = guarded(entry, [&] { return load_mesh(read_text(dir / "meshes" / m.file, entry)); });
    bundle.meshes.push_back({std::make_shared<const TriangleMesh>(std::move(mesh)), m.appearance});
  }

  if (fs::is_directory(dir / "dicom")) {
    bundle.volume = guarded("dicom/", [&] {
      std::vector<DicomDataset> slices;
      for (const auto& f : sorted_files(dir / "dicom")) {
        const std::string entry = relative_name(f, dir);
        slices.push_back(guarded(entry, [&] { return read_dicom_file(f.string()); }));
      }
      return std::make_shared<const Volume>(assemble_series(slices));
    });
  }

  if (fs::exists(dir / "patient.json")) {
    bundle.record = guarded("patient.json", [&] {
      return patient_record_from_json(read_json(dir / "patient.json", "patient.json"));
    });
    for (auto& im : bundle.record.images) {
      const std::string entry = im.file;
      const fs::path p = dir / im.file;
      if (!fs::is_regular_file(p)) {
        throw EntryError(entry, ErrorCode::ManifestEntryUnreadable, entry + ": image not found");
      }
      if (!slot_ids.empty() &&
          std::find(slot_ids.begin(), slot_ids.end(), im.slot) == slot_ids.end()) {
        throw EntryError(entry, ErrorCode::InvalidArgument,
                         entry + ": unknown screen slot '" + im.slot + "'");
      }
      im.file = fs::absolute(p).lexically_normal().string();
    }
  }

  if (fs::exists(dir / "annotations.json")) {
    bundle.annotations = guarded("annotations.json", [&] {
      return annotations_from_json(read_json(dir / "annotations.json", "annotations.json"));
    });
  }

  bundle.transfer_function =
      fs::exists(dir / "transfer.json")
          ? guarded("transfer.json", [&] {
              return transfer_function_from_json(read_json(dir / "transfer.json", "transfer.json"));
            })
          : default_ct_transfer_function();
  return bundle;
}

std::vector<FileReport> validate_patient_directory(const fs::path& dir) {
  std::vector<FileReport> reports;
  auto check = [&](const std::string& file, auto&& fn) {
    FileReport r{file, true, "ok"};
    try {
      fn();
    } catch (const std::exception& e) {
      r.ok = false;
      r.message = e.what();
    }
    reports.push_back(std::move(r));
  };

  if (!fs::is_directory(dir)) {
    reports.push_back({dir.string(), false, "not a directory"});
    return reports;
  }

  std::vector<ManifestEntry> manifest;
  check("meshes/meshes.json", [&] { manifest = read_manifest(dir); });
  for (const auto& m : manifest) {
    const std::string entry = "meshes/" + m.file;
    check(entry, [&] { load_mesh(read_text(dir / "meshes" / m.file, entry)); });
  }

  if (fs::is_directory(dir / "dicom")) {
    std::vector<DicomDataset> slices;
    bool all_parsed = true;
    for (const auto& f : sorted_files(dir / "dicom")) {
      check(relative_name(f, dir), [&] {
        try {
          auto ds = read_dicom_file(f.string());
          slice_geometry(ds);
          slices.push_back(std::move(ds));
        } catch (...) {
          all_parsed = false;
          throw;
        }
      });
    }
    if (all_parsed) check("dicom/ (series)", [&] { assemble_series(slices); });
  }

  auto check_json = [&](const std::string& name, auto&& parse) {
    if (!fs::exists(dir / name)) return;
    check(name, [&] { parse(read_json(dir / name, name)); });
  };
  PatientRecord record;
  check_json("patient.json", [&](const nlohmann::json& j) { record = patient_record_from_json(j); });
  for (const auto& im : record.images) {
    check(im.file, [&] {
      if (!fs::is_regular_file(dir / im.file)) fail(ErrorCode::ManifestEntryUnreadable, "image not found");
    });
  }
  check_json("annotations.json", [](const nlohmann::json& j) { annotations_from_json(j); });
  check_json("transfer.json", [](const nlohmann::json& j) { transfer_function_from_json(j); });
  return reports;
}

}  // namespace imhotep
