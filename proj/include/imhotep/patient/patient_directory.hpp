#pragma once

#include "imhotep/patient/mesh.hpp"
#include "imhotep/scene/annotation.hpp"
#include "imhotep/volume/transfer_function.hpp"
#include "imhotep/volume/volume.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace imhotep {

struct LabResult {
  std::string name;
  double value = 0.0;
  std::string unit;
  std::string timestamp;
};

struct RecordImage {
  std::string file;  // absolute path after loading
  std::string caption;
  std::string slot;
};

struct PatientRecord {
  std::string name;
  std::string age;
  std::string sex;
  std::string diagnosis;
  std::string notes_html;
  std::vector<LabResult> labs;
  std::vector<RecordImage> images;
};

struct OrganMesh {
  std::shared_ptr<const TriangleMesh> mesh;
  Appearance appearance;
};

/// Everything a patient directory contributes to a scene, produced in one
/// piece so it can be loaded by a single background task.
struct PatientBundle {
  std::shared_ptr<const Volume> volume;  // null when the directory has no dicom/
  std::vector<OrganMesh> meshes;
  PatientRecord record;
  std::vector<Annotation> annotations;
  TransferFunction transfer_function;
};

/// Loads the directory layout
///   patient.json, dicom/, meshes/meshes.json + mesh files,
///   annotations.json, transfer.json, images/.
/// Missing optional parts (volume, record, annotations, transfer function)
/// produce empty or default values. `slot_ids`, when non-empty, restricts
/// the screen slots that record images may reference.
PatientBundle load_patient_directory(const std::filesystem::path& dir,
                                     std::span<const std::string> slot_ids = {});

PatientRecord patient_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PatientRecord& r);

/// Loads every regular file under `dicom_dir` (sorted by name) as one series.
Volume load_dicom_series(const std::filesystem::path& dicom_dir);

struct FileReport {
  std::string file;  // path relative to the patient directory
  bool ok = true;
  std::string message;
};

/// Checks every file of a patient directory independently and reports one
/// line per file instead of stopping at the first failure.
std::vector<FileReport> validate_patient_directory(const std::filesystem::path& dir);

}  // namespace imhotep
