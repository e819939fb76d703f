#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace alphaloop::loop {

/// Root mean square (µV). Throws std::invalid_argument on empty input.
double compute_window_rms(std::span<const double> series);

enum class SignalStrength { Red, Orange, Green };

/// Red for rms <= 1 µV, Orange for 1 < rms <= 5 µV, Green above 5 µV.
SignalStrength classify_signal_strength(double rms_uv);
std::string_view to_string(SignalStrength s);

struct ChannelQualityState {
  /// Latest 5-s RMS per channel; empty until a full window has been seen.
  std::vector<std::optional<double>> rms_uv;
  std::size_t active_channel = 0;
  double switch_threshold_uv = 5.0;
};

/// Keeps the active channel while its RMS is at or above threshold; otherwise
/// picks the remaining channel with the highest RMS (ties → lowest index).
/// Requires at least two channels with current RMS values.
std::size_t select_channel(const ChannelQualityState& state);

struct BlinkTestResult {
  std::size_t detected = 0;
  bool pass = false;
};

inline constexpr std::size_t kBlinkCueCount = 10;
inline constexpr double kBlinkThresholdUv = 100.0;
inline constexpr double kBlinkWindowS = 1.0;
inline constexpr std::size_t kBlinkPassCount = 7;

/// Counts cues whose following 1-s window holds a sample above +100 µV; the
/// test passes with 7 or more. Exactly 10 in-range cues are required.
BlinkTestResult blink_test(std::span<const double> series, double sample_rate, std::span<const double> cue_times_s);

}  // namespace alphaloop::loop
