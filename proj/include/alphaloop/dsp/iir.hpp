#pragma once

#include <complex>
#include <span>
#include <vector>

namespace alphaloop::dsp {

/// How the Butterworth passband is anchored.
///  - Center: zero phase and unity gain exactly at center_hz; the prewarped
///    bandwidth matches center ± half-bandwidth. Suited to narrow tracking
///    bands.
///  - Edges: the -3 dB edges sit exactly at center ± half-bandwidth; zero phase
///    falls at their (prewarped) geometric mean. Suited to wide bands.
enum class BandCentering { Center, Edges };

/// Bandpass request: passband center_hz ± half_bandwidth_hz at sample_rate.
/// `order` is the Butterworth prototype order; the digital filter has
/// 2·order poles realized as `order` second-order sections.
struct BandpassSpec {
  double center_hz = 10.0;
  double half_bandwidth_hz = 2.0;
  int order = 2;
  double sample_rate = 250.0;
  BandCentering centering = BandCentering::Center;

  double low_hz() const { return center_hz - half_bandwidth_hz; }
  double high_hz() const { return center_hz + half_bandwidth_hz; }

  /// Throws std::invalid_argument when the band leaves (0, Nyquist) or the
  /// order is outside {1, 2, 3, 4}.
  void validate() const;

  static BandpassSpec from_edges(double low_hz, double high_hz, int order, double sample_rate);
};

/// One biquad: (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  std::complex<double> response(double omega) const;
};

class FilterCoefficients {
 public:
  FilterCoefficients() = default;
  FilterCoefficients(std::vector<Biquad> sections, double sample_rate);

  const std::vector<Biquad>& sections() const { return sections_; }
  double sample_rate() const { return sample_rate_; }

  /// Expanded transfer-function polynomials; feedback()[0] == 1.
  std::vector<double> feedforward() const;
  std::vector<double> feedback() const;

  std::vector<std::complex<double>> poles() const;

  std::complex<double> response_at(double freq_hz) const;
  double gain_at(double freq_hz) const { return std::abs(response_at(freq_hz)); }
  /// Phase of the response in degrees, (-180, 180].
  double phase_deg_at(double freq_hz) const;

 private:
  std::vector<Biquad> sections_;
  double sample_rate_ = 0.0;
};

/// Butterworth bandpass via analog lowpass→bandpass mapping and the bilinear
/// transform. Gain is normalized to exactly 1 at the zero-phase frequency
/// (center_hz for BandCentering::Center).
FilterCoefficients design_bandpass(const BandpassSpec& spec);

/// Direct-form-II-transposed cascade holding per-section state.
class SosFilter {
 public:
  explicit SosFilter(FilterCoefficients coeffs);

  double process(double x) {
    for (std::size_t i = 0; i < sections_.size(); ++i) {
      const Biquad& s = sections_[i];
      double* z = &state_[2 * i];
      const double y = s.b0 * x + z[0];
      z[0] = s.b1 * x - s.a1 * y + z[1];
      z[1] = s.b2 * x - s.a2 * y;
      x = y;
    }
    return x;
  }

  void reset();
  const FilterCoefficients& coefficients() const { return coeffs_; }

 private:
  FilterCoefficients coeffs_;
  std::vector<Biquad> sections_;
  std::vector<double> state_;
};

/// Causal filtering from rest. Output length equals input length.
std::vector<double> filter_stream(const FilterCoefficients& coeffs, std::span<const double> series);

/// Forward-backward (zero-phase) filtering with odd-reflection padding at both
/// ends. The effective magnitude response is |H|².
std::vector<double> filtfilt(const FilterCoefficients& coeffs, std::span<const double> series);

}  // namespace alphaloop::dsp
