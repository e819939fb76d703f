#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "alphaloop/dsp/fft.hpp"
#include "alphaloop/dsp/iir.hpp"

namespace alphaloop::dsp {

/// Phase reported in the cosine convention: 0° is the positive peak, 90° the
/// falling zero crossing, 180° the trough.
struct PhaseEstimate {
  double phase_deg = 0.0;
  double amplitude_uv = 0.0;
  double inst_freq_hz = 0.0;
};

/// A validated view over the newest `samples.size()` samples.
class RealWindow {
 public:
  RealWindow(std::span<const double> samples, double sample_rate);

  std::span<const double> samples() const { return samples_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::span<const double> samples_;
  double sample_rate_;
};

struct EchtConfig {
  std::size_t window_samples = 250;
  BandpassSpec band{};

  void validate() const;
};

/// Endpoint-corrected Hilbert transform for a fixed window length and band.
///
/// The window spectrum is made analytic (DC and Nyquist kept at unit weight,
/// positive bins doubled, negative bins zeroed), multiplied by the causal
/// bandpass response sampled at each bin, and inverted; the phase and
/// magnitude of the last output sample are the estimate.
///
/// Because only the final output sample is needed, the whole chain is also a
/// fixed complex FIR kernel applied to the window. `estimate` uses that kernel
/// (O(N) per call) and `estimate_fft` the explicit transform route; the two
/// agree to rounding error.
class EchtEstimator {
 public:
  explicit EchtEstimator(EchtConfig cfg);

  const EchtConfig& config() const { return cfg_; }
  std::size_t window_size() const { return cfg_.window_samples; }
  const FilterCoefficients& filter() const { return filter_; }

  /// Per-bin weights: analytic mask times the bandpass response.
  std::span<const cplx> bin_weights() const { return weights_; }

  PhaseEstimate estimate_fft(const RealWindow& window) const;
  PhaseEstimate estimate(const RealWindow& window) const;

  /// Analytic value at the newest sample of the N samples starting at
  /// `window_begin`. No validation.
  cplx endpoint(const double* window_begin) const;

 private:
  void check(const RealWindow& window) const;
  PhaseEstimate from_pair(cplx last, cplx prev) const;

  EchtConfig cfg_;
  FilterCoefficients filter_;
  std::vector<cplx> weights_;
  std::vector<cplx> kernel_last_;
  std::vector<cplx> kernel_prev_;
};

/// Single-shot ecHT through the explicit FFT route.
PhaseEstimate echt(const RealWindow& window, const BandpassSpec& spec);

/// ecHT at many endpoints of one series: result[i] is the estimate for the
/// window ending at sample endpoints[i] (inclusive). Every endpoint must be
/// ≥ N - 1. The serial version is the reference; the OpenMP version splits
/// endpoints across threads and is bit-identical to it.
std::vector<PhaseEstimate> echt_endpoints_serial(const EchtEstimator& est, std::span<const double> series,
                                                 std::span<const std::size_t> endpoints);
std::vector<PhaseEstimate> echt_endpoints(const EchtEstimator& est, std::span<const double> series,
                                          std::span<const std::size_t> endpoints);

}  // namespace alphaloop::dsp
