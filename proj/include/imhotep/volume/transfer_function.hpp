#pragma once

#include "imhotep/core/geometry.hpp"

#include <json.hpp>

#include <vector>

namespace imhotep {

struct ControlPoint {
  double value = 0.0;  // HU
  Vec4 rgba = Vec4::Zero();
};

/// Piecewise-linear scalar -> RGBA map. Opacities are defined per
/// `reference_step` millimetres of path length.
struct TransferFunction {
  std::vector<ControlPoint> points;
  double reference_step = 1.0;

  void validate() const;
};

/// Interpolates between the bracketing control points; clamps to the first
/// or last point outside their range.
Vec4 tf_eval(const TransferFunction& tf, double value);

/// Soft-tissue / contrast / bone preset for abdominal CT.
TransferFunction default_ct_transfer_function();

TransferFunction transfer_function_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TransferFunction& tf);

}  // namespace imhotep
