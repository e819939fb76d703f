#pragma once

#include <array>
#include <span>
#include <vector>

#include "alphaloop/analysis/multitaper.hpp"

namespace alphaloop::analysis {

struct IafConfig {
  SpectrogramConfig spectrogram{};
  /// Band over which log10 power is fit by a cubic in log10 frequency.
  double fit_low_hz = 3.0;
  double fit_high_hz = 30.0;
  double search_low_hz = 7.5;
  double search_high_hz = 14.0;
  /// Peak must exceed this multiple of the median absolute fit residual.
  double floor_factor = 10.0;
  double min_duration_s = 60.0;

  void validate() const;
};

struct IafResult {
  double iaf_hz = 0.0;
  /// Detrended log10 power above the higher flanking minimum.
  double peak_prominence = 0.0;
  double noise_floor = 0.0;
  /// c0 + c1·x + c2·x² + c3·x³ with x = log10(f).
  std::array<double, 4> detrend_coefficients{};
  std::vector<double> freqs_hz;
  std::vector<double> median_power;
  std::vector<double> detrended;  // NaN outside the fit band
};

/// Median multitaper spectrum → 1/f cubic detrend → most prominent peak in
/// the search band, refined by a parabola through the peak bin and its
/// neighbours. Throws NoPeakError when nothing clears the floor.
IafResult estimate_iaf(std::span<const double> series, double sample_rate, const IafConfig& cfg = {});

/// Least-squares polynomial coefficients (ascending powers).
std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, std::size_t degree);

}  // namespace alphaloop::analysis
