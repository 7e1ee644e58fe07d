#include "imhotep/scene/annotation.hpp"

#include "imhotep/core/error.hpp"

#include <cmath>
#include <set>

namespace imhotep {

void Annotation::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-4) {
    fail(ErrorCode::InvalidArgument, "annotation " + std::to_string(id) + " normal is not unit");
  }
}

std::vector<Annotation> annotations_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidArgument, "annotations must be a JSON array");
  std::vector<Annotation> out;
  std::set<int> ids;
  try {
    for (const auto& e : j) {
      Annotation a;
      a.id = e.at("id").get<int>();
      const auto& p = e.at("position");
      const auto& n = e.at("normal");
      if (p.size() != 3 || n.size() != 3) fail(ErrorCode::InvalidArgument, "expected [x, y, z]");
      a.anchor = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
      Vec3 normal(n[0].get<double>(), n[1].get<double>(), n[2].get<double>());
      if (!(normal.norm() > 0.0)) {
        fail(ErrorCode::InvalidArgument, "annotation " + std::to_string(a.id) + " has a zero normal");
      }
      a.normal = normal.normalized();
      a.text = e.at("text").get<std::string>();
      if (!ids.insert(a.id).second) {
        fail(ErrorCode::InvalidArgument, "duplicate annotation id " + std::to_string(a.id));
      }
      out.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("annotations: ") + e.what());
  }
  return out;
}

nlohmann::json to_json(const Annotation& a) {
  return {{"id", a.id},
          {"position", {a.anchor.x(), a.anchor.y(), a.anchor.z()}},
          {"normal", {a.normal.x(), a.normal.y(), a.normal.z()}},
          {"text", a.text},
          {"label_distance", a.label_distance}};
}

}  // namespace imhotep
