#include "imhotep/volume/opacity.hpp"

#include <cmath>

namespace imhotep {

double opacity_correct(double alpha, double step, double reference_step) {
  if (alpha <= 0.0) return 0.0;
  if (alpha >= 1.0) return 1.0;
  return -std::expm1(std::log1p(-alpha) * (step / reference_step));
}

}  // namespace imhotep
