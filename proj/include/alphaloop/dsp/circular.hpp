#pragma once

#include <cstddef>
#include <span>

namespace alphaloop::dsp {

struct CircularStats {
  double mean_deg = 0.0;
  double resultant_length = 0.0;  // PLV
  double angular_deviation_deg = 0.0;
  double median_deg = 0.0;
  std::size_t n = 0;
};

/// degrees(sqrt(2 (1 - R))).
double angular_deviation_deg(double resultant_length);

/// Circular mean, resultant length, angular deviation and circular median
/// (the sample angle minimizing mean circular distance; ties go to the
/// smallest angle). Throws std::invalid_argument on empty or non-finite input.
CircularStats circ_stats(std::span<const double> angles_deg);

}  // namespace alphaloop::dsp
