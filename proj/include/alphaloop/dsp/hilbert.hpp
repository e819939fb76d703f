#pragma once

#include <span>
#include <vector>

namespace alphaloop::dsp {

struct AnalyticSeries {
  std::vector<double> phase_deg;
  std::vector<double> amplitude_uv;
};

/// Non-causal analytic signal of a whole record, built in the frequency
/// domain. Only the central half of the record is free of edge distortion;
/// `interior_begin/end` give that region.
AnalyticSeries hilbert_offline(std::span<const double> series, double sample_rate);

inline std::size_t interior_begin(std::size_t n) { return n / 4; }
inline std::size_t interior_end(std::size_t n) { return n - n / 4; }

}  // namespace alphaloop::dsp
