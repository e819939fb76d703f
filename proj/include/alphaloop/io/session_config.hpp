#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "alphaloop/analysis/erp.hpp"
#include "alphaloop/analysis/iaf.hpp"
#include "alphaloop/loop/session.hpp"
#include "alphaloop/sim/synth.hpp"

namespace alphaloop::io {

/// Everything a pipeline run needs. Loaded from JSON; unspecified keys keep
/// their defaults and unknown keys are rejected.
struct SessionConfig {
  std::uint64_t seed = 1;
  double sample_rate_hz = 250.0;
  sim::SynthConfig simulation{};
  loop::LoopConfig loop = loop::LoopConfig::defaults();
  /// Unset: the session spans the whole input.
  std::optional<double> session_duration_s;
  double p1_latency_s = 0.0624;
  /// When set, the onset target is stim_onset_phase(this, p1_latency, ecHT
  /// center) and the offset target sits 90° later.
  std::optional<double> erp_target_phase_deg;
  analysis::IafConfig iaf{};
  analysis::ErpConfig erp{};

  /// Throws std::invalid_argument on any invalid field.
  void validate() const;
};

SessionConfig parse_session_config(std::string_view json_text, std::string_view origin = "config");
SessionConfig load_session_config(const std::filesystem::path& path);

/// Fully resolved configuration; parsing it yields an identical config.
std::string to_json_text(const SessionConfig& cfg);

/// Re-derives simulation seeds from a new master seed.
void apply_seed(SessionConfig& cfg, std::uint64_t seed);

/// Loop configuration for an input of the given duration.
loop::LoopConfig resolve_loop(const SessionConfig& cfg, double input_duration_s);

}  // namespace alphaloop::io
