#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alphaloop {

/// Uniformly sampled multi-channel voltage series (µV), channel-major.
struct EegRecording {
  double sample_rate_hz = 250.0;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> channels;
  std::string start_timestamp = "2000-01-01T00:00:00Z";
  /// Free-form key/value provenance (seed, generator, ...), kept in order.
  std::vector<std::pair<std::string, std::string>> provenance;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels.front().size(); }
  double duration_s() const { return static_cast<double>(num_samples()) / sample_rate_hz; }

  void validate() const {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
      throw std::invalid_argument("recording sample rate must be positive");
    }
    if (channels.empty() || channels.size() > 3) throw std::invalid_argument("recording must have 1 to 3 channels");
    if (labels.size() != channels.size()) throw std::invalid_argument("recording labels do not match channels");
    for (const auto& c : channels) {
      if (c.size() != channels.front().size()) throw std::invalid_argument("recording channels differ in length");
    }
  }

  std::optional<std::size_t> channel_index(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    return std::nullopt;
  }
};

/// Per-sample oscillator phase (cosine convention, degrees in [0, 360)) and
/// amplitude (µV) of the simulated rhythm: the oracle for accuracy claims.
struct GroundTruthPhase {
  std::vector<double> phase_deg;
  std::vector<double> amp_uv;

  std::size_t size() const { return phase_deg.size(); }
  bool empty() const { return phase_deg.empty(); }
};

inline const std::vector<std::string>& default_channel_labels() {
  static const std::vector<std::string> labels{"Fp1", "Fpz", "Fp2"};
  return labels;
}

}  // namespace alphaloop
