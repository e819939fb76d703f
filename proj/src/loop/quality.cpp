#include "alphaloop/loop/quality.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace alphaloop::loop {

double compute_window_rms(std::span<const double> series) {
  if (series.empty()) throw std::invalid_argument("compute_window_rms: empty series");
  double ss = 0.0;
  for (double v : series) ss += v * v;
  return std::sqrt(ss / static_cast<double>(series.size()));
}

SignalStrength classify_signal_strength(double rms_uv) {
  if (!(rms_uv >= 0.0)) throw std::invalid_argument("classify_signal_strength: RMS must be >= 0");
  if (rms_uv <= 1.0) return SignalStrength::Red;
  if (rms_uv <= 5.0) return SignalStrength::Orange;
  return SignalStrength::Green;
}

std::string_view to_string(SignalStrength s) {
  switch (s) {
    case SignalStrength::Red: return "red";
    case SignalStrength::Orange: return "orange";
    case SignalStrength::Green: return "green";
  }
  return "?";
}

std::size_t select_channel(const ChannelQualityState& state) {
  std::size_t with_values = 0;
  for (const auto& r : state.rms_uv) with_values += r.has_value() ? 1 : 0;
  if (with_values < 2) throw std::invalid_argument("select_channel: need RMS values for at least two channels");
  if (state.active_channel >= state.rms_uv.size()) throw std::out_of_range("select_channel: active channel out of range");

  const auto& current = state.rms_uv[state.active_channel];
  if (current && *current >= state.switch_threshold_uv) return state.active_channel;

  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < state.rms_uv.size(); ++c) {
    if (c == state.active_channel || !state.rms_uv[c]) continue;
    if (!best || *state.rms_uv[c] > *state.rms_uv[*best]) best = c;
  }
  return best.value_or(state.active_channel);
}

BlinkTestResult blink_test(std::span<const double> series, double sample_rate, std::span<const double> cue_times_s) {
  if (cue_times_s.size() != kBlinkCueCount) {
    throw std::invalid_argument("blink_test: expected " + std::to_string(kBlinkCueCount) + " cues, got " +
                                std::to_string(cue_times_s.size()));
  }
  if (!(sample_rate > 0.0)) throw std::invalid_argument("blink_test: sample_rate must be positive");
  const double duration = static_cast<double>(series.size()) / sample_rate;
  BlinkTestResult r;
  for (double cue : cue_times_s) {
    if (!(cue >= 0.0 && cue < duration)) throw std::out_of_range("blink_test: cue time outside the series");
    const auto lo = static_cast<std::size_t>(std::ceil(cue * sample_rate));
    const auto hi = std::min(series.size(), static_cast<std::size_t>(std::floor((cue + kBlinkWindowS) * sample_rate)) + 1);
    for (std::size_t i = lo; i < hi; ++i) {
      if (series[i] > kBlinkThresholdUv) {
        ++r.detected;
        break;
      }
    }
  }
  r.pass = r.detected >= kBlinkPassCount;
  return r;
}

}  // namespace alphaloop::loop
