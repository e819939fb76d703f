#include "alphaloop/dsp/angles.hpp"

#include <stdexcept>

namespace alphaloop::dsp {

double wrap360(double angle_deg) {
  if (!std::isfinite(angle_deg)) {
    throw std::invalid_argument("wrap360: angle is not finite");
  }
  double r = std::fmod(angle_deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value plus 360 rounds to exactly 360.
  if (r >= 360.0) r = 0.0;
  return r;
}

double wrap180(double angle_deg) {
  double r = wrap360(angle_deg);
  if (r > 180.0) r -= 360.0;
  return r;
}

}  // namespace alphaloop::dsp
