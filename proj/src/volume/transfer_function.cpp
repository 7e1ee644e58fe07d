#include "imhotep/volume/transfer_function.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>

namespace imhotep {

void TransferFunction::validate() const {
  if (points.size() < 2) fail(ErrorCode::InvalidArgument, "transfer function needs >= 2 points");
  if (!(reference_step > 0.0)) {
    fail(ErrorCode::InvalidArgument, "transfer function reference_step must be > 0");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && !(points[i].value > points[i - 1].value)) {
      fail(ErrorCode::InvalidArgument, "transfer function values must be strictly increasing");
    }
    for (int c = 0; c < 4; ++c) {
      const double ch = points[i].rgba[c];
      if (!(ch >= 0.0 && ch <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "transfer function channel outside [0,1]");
      }
    }
  }
}

Vec4 tf_eval(const TransferFunction& tf, double value) {
  const auto& pts = tf.points;
  if (value <= pts.front().value) return pts.front().rgba;
  if (value >= pts.back().value) return pts.back().rgba;
  auto hi = std::upper_bound(pts.begin(), pts.end(), value,
                             [](double v, const ControlPoint& p) { return v < p.value; });
  auto lo = hi - 1;
  const double w = (value - lo->value) / (hi->value - lo->value);
  return (1.0 - w) * lo->rgba + w * hi->rgba;
}

TransferFunction default_ct_transfer_function() {
  TransferFunction tf;
  tf.reference_step = 1.0;
  tf.points = {
      {-1000.0, Vec4(0.0, 0.0, 0.0, 0.0)},
      {-200.0, Vec4(0.0, 0.0, 0.0, 0.0)},
      {40.0, Vec4(0.75, 0.35, 0.30, 0.02)},
      {150.0, Vec4(0.90, 0.45, 0.40, 0.05)},
      {300.0, Vec4(0.95, 0.90, 0.80, 0.25)},
      {1200.0, Vec4(1.0, 1.0, 0.95, 0.6)},
  };
  return tf;
}

TransferFunction transfer_function_from_json(const nlohmann::json& j) {
  TransferFunction tf;
  try {
    tf.reference_step = j.at("reference_step_mm").get<double>();
    for (const auto& p : j.at("points")) {
      ControlPoint cp;
      cp.value = p.at("value").get<double>();
      const auto& rgba = p.at("rgba");
      if (!rgba.is_array() || rgba.size() != 4) {
        fail(ErrorCode::InvalidArgument, "rgba must have 4 entries");
      }
      for (int c = 0; c < 4; ++c) cp.rgba[c] = rgba[static_cast<std::size_t>(c)].get<double>();
      tf.points.push_back(cp);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("transfer function: ") + e.what());
  }
  tf.validate();
  return tf;
}

nlohmann::json to_json(const TransferFunction& tf) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : tf.points) {
    points.push_back({{"value", p.value}, {"rgba", {p.rgba[0], p.rgba[1], p.rgba[2], p.rgba[3]}}});
  }
  return {{"reference_step_mm", tf.reference_step}, {"points", std::move(points)}};
}

}  // namespace imhotep
