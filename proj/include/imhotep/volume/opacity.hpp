#pragma once

namespace imhotep {

/// Rescales an opacity defined per `reference_step` of path length to a
/// sample taken every `step`: 1 - (1 - alpha)^(step / reference_step).
double opacity_correct(double alpha, double step, double reference_step);

}  // namespace imhotep
