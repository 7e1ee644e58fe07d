#pragma once

#include "imhotep/core/geometry.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace imhotep {

/// Point marker with a textual label pushed out along `normal`.
struct Annotation {
  int id = 0;
  Vec3 anchor = Vec3::Zero();  // patient mm
  Vec3 normal = Vec3::UnitZ();
  std::string text;
  double label_distance = 0.0;  // m, filled in by label placement

  void validate() const;
};

/// Parses the `annotations.json` array; normals are normalised on load.
std::vector<Annotation> annotations_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Annotation& a);

}  // namespace imhotep
