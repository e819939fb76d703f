#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace alphaloop::analysis {

struct SpectrogramConfig {
  std::size_t n_tapers = 4;
  double window_s = 6.0;
  double step_s = 0.150;
  /// Time-half-bandwidth product NW of the Slepian family.
  double time_bandwidth = 2.5;
  /// FFT length; 0 selects the next power of two at or above the window.
  std::size_t nfft = 0;

  void validate() const;
};

/// Power spectral density (µV²/Hz), one-sided, row-major [window][bin].
struct Spectrogram {
  std::vector<double> times_s;  // window centers
  std::vector<double> freqs_hz;
  std::vector<double> power;

  std::size_t n_times() const { return times_s.size(); }
  std::size_t n_freqs() const { return freqs_hz.size(); }
  double at(std::size_t t, std::size_t f) const { return power[t * freqs_hz.size() + f]; }
  std::span<const double> row(std::size_t t) const { return {power.data() + t * freqs_hz.size(), freqs_hz.size()}; }
};

/// The k leading discrete prolate spheroidal sequences of length n, unit
/// energy. Even-order tapers have a positive sum, odd-order a positive
/// first moment about the center.
std::vector<std::vector<double>> dpss(std::size_t n, double time_bandwidth, std::size_t k);

/// Sliding-window multitaper PSD. The serial version is the reference; the
/// OpenMP version distributes windows across threads with identical output.
Spectrogram multitaper_spectrogram_serial(std::span<const double> series, double sample_rate,
                                          const SpectrogramConfig& cfg = {});
Spectrogram multitaper_spectrogram(std::span<const double> series, double sample_rate,
                                   const SpectrogramConfig& cfg = {});

/// Per-bin median over windows.
std::vector<double> median_spectrum(const Spectrogram& s);

}  // namespace alphaloop::analysis
