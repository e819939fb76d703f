#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alphaloop/recording.hpp"

namespace alphaloop::sim {

/// White Gaussian spectrum shaped by f^(-1/2) and inverted: 1/f power,
/// zero mean, RMS exactly `level_uv`. Requires n >= 256.
std::vector<double> gen_pink_noise(std::size_t n, double sample_rate, double level_uv, std::uint64_t seed);

/// Fraction of a series' power (periodogram) falling in [low_hz, high_hz].
double band_power_fraction(std::span<const double> series, double sample_rate, double low_hz, double high_hz);

/// Periodogram power (mean-square units) falling in [low_hz, high_hz].
double band_power(std::span<const double> series, double sample_rate, double low_hz, double high_hz);

struct OscillatorSpec {
  double base_freq_hz = 10.0;
  double amplitude_uv = 20.0;
  double am_depth = 0.0;
  double am_rate_hz = 0.1;
  double freq_jitter_hz = 0.0;
  /// Starting phase; when unset it is drawn from `seed`.
  std::optional<double> initial_phase_deg;
  std::uint64_t seed = 1;

  void validate() const;
};

inline constexpr double kFrequencyDriftRateHz = 0.05;

struct ErpTemplate {
  double p1_latency_s = 0.0624;
  double p1_amplitude_uv = 6.0;
  double p1_width_s = 0.010;
  /// N1 trough follows P1 by this much.
  double n1_delay_s = 0.045;
  double n1_amplitude_uv = 8.0;
  double n1_width_s = 0.015;

  bool phase_dependent = false;
  double post_stim_alpha_gain_peak = 1.0;
  double post_stim_alpha_gain_trough = 1.0;
  double gain_horizon_s = 0.5;

  void validate() const;
  /// Waveform (µV) at time t after stimulus onset.
  double value(double t_s) const;
};

struct Annotation {
  enum class Kind { Blink, Erp };
  Kind kind;
  double time_s;
  double value;  // blink peak µV, or oscillator gain applied at ERP arrival
};

/// Synthetic recording with its ground truth. `oscillator` is the unit-gain
/// oscillator contribution; channel c carries oscillator * osc_channel_gain[c].
struct SimTrace {
  EegRecording recording;
  GroundTruthPhase truth;
  std::vector<double> oscillator;
  std::vector<double> osc_channel_gain;
  std::vector<Annotation> annotations;

  double duration_s() const { return recording.duration_s(); }
  /// Ground-truth phase at an arbitrary time, interpolated along the unwrapped
  /// phase between neighbouring samples.
  double truth_phase_at(double t_s) const;
};

/// Ground-truth phase at time t (interpolated), shared with recordings read
/// back from disk.
double truth_phase_at(const GroundTruthPhase& truth, double sample_rate, double t_s);

/// Oscillator-only trace: every channel carries the oscillator scaled by
/// `channel_gains` (default three channels at unit gain).
SimTrace gen_alpha_trace(const OscillatorSpec& spec, double duration_s, double sample_rate,
                         std::vector<double> channel_gains = {1.0, 1.0, 1.0});

inline constexpr double kBlinkDurationS = 0.300;

/// Adds a positive 300 ms half-sine peaking at each time (channel `channel`).
SimTrace inject_blinks(SimTrace trace, std::span<const double> times_s, double peak_uv, std::size_t channel = 1);

/// Adds the ERP template after each stimulus on `channel`; when the template
/// is phase-dependent, also rescales the oscillator on every channel for the
/// gain horizon after P1 arrival.
SimTrace inject_erp(SimTrace trace, std::span<const double> stim_times_s, const ErpTemplate& tmpl,
                    std::size_t channel = 1);

struct NoiseSpec {
  /// Oscillator-to-noise power ratio within base_freq ± snr_band_half_width.
  /// When set it overrides level_uv.
  std::optional<double> alpha_snr_db;
  double level_uv = 0.0;
  double snr_band_half_width_hz = 2.0;
};

struct SynthConfig {
  OscillatorSpec oscillator;
  double duration_s = 60.0;
  double sample_rate = 250.0;
  NoiseSpec noise;
  std::uint64_t noise_seed = 7;
  double side_channel_attenuation = 0.8;
  std::vector<double> blink_times_s;
  double blink_peak_uv = 150.0;
  std::vector<double> erp_stim_times_s;
  ErpTemplate erp;
};

/// Three-channel composition: Fpz = oscillator + noise + artifacts, Fp1/Fp2 =
/// independent noise + attenuated oscillator.
SimTrace synth_recording(const SynthConfig& cfg);

/// Noise RMS that realizes the configured in-band SNR against `noise` of unit
/// RMS, or level_uv when no SNR is set.
double noise_level_for(const SynthConfig& cfg, std::span<const double> unit_noise);

}  // namespace alphaloop::sim
