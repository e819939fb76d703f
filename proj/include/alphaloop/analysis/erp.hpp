#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace alphaloop::analysis {

struct ErpConfig {
  double epoch_start_s = -0.250;
  double epoch_end_s = 0.500;
  double reject_threshold_uv = 100.0;
  double band_low_hz = 2.0;
  double band_high_hz = 30.0;
  int filter_order = 2;
  double p1_start_s = 0.035;
  double p1_end_s = 0.075;

  void validate() const;
};

struct ErpAverage {
  double sample_rate_hz = 0.0;
  std::vector<double> times_s;  // relative to stimulus
  std::vector<double> waveform;
  std::size_t kept = 0;
  std::size_t rejected = 0;
  /// Stimuli whose epoch would run past either end of the record.
  std::size_t excluded = 0;
};

/// Zero-phase bandpass, epoch around each stimulus, reject epochs whose
/// filtered |v| exceeds the threshold, average the rest.
ErpAverage epoch_erp(std::span<const double> series, double sample_rate, std::span<const double> stim_times_s,
                     const ErpConfig& cfg = {});

/// Latency of the largest positive local maximum inside the P1 window;
/// equal maxima resolve to the earliest. Throws NoPositivePeakError.
double detect_p1(const ErpAverage& avg, const ErpConfig& cfg = {});

}  // namespace alphaloop::analysis
