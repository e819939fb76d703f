#include "alphaloop/loop/scheduler.hpp"

#include <cmath>
#include <stdexcept>

#include "alphaloop/dsp/angles.hpp"

namespace alphaloop::loop {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::NoAudio: return "no_audio";
    case Condition::PeakLocked: return "peak_locked";
    case Condition::TroughLocked: return "trough_locked";
  }
  return "?";
}

Condition condition_from_string(std::string_view s) {
  if (s == "no_audio") return Condition::NoAudio;
  if (s == "peak_locked") return Condition::PeakLocked;
  if (s == "trough_locked") return Condition::TroughLocked;
  throw std::invalid_argument("unknown condition '" + std::string(s) + "'");
}

std::string_view to_string(EventKind k) { return k == EventKind::Onset ? "onset" : "offset"; }

EventKind event_kind_from_string(std::string_view s) {
  if (s == "onset") return EventKind::Onset;
  if (s == "offset") return EventKind::Offset;
  throw std::invalid_argument("unknown event kind '" + std::string(s) + "'");
}

void StimulusSpec::validate() const {
  if (!(pulse_duration_s > 0.0) || !std::isfinite(pulse_duration_s)) {
    throw std::invalid_argument("stimulus: pulse_duration_s must be positive");
  }
  if (!std::isfinite(pulse_level_db_spl) || !std::isfinite(background_level_db_spl) || !std::isfinite(snr_db)) {
    throw std::invalid_argument("stimulus: levels must be finite");
  }
  if (std::abs(snr_db - (pulse_level_db_spl - background_level_db_spl)) > 1e-9) {
    throw std::invalid_argument("stimulus: snr_db must equal pulse level minus background level");
  }
}

SchedulerConfig SchedulerConfig::for_condition(Condition c) {
  SchedulerConfig cfg;
  cfg.condition = c;
  if (c == Condition::TroughLocked) {
    cfg.onset_phase_deg = 134.0;
    cfg.offset_phase_deg = 224.0;
  }
  return cfg;
}

void SchedulerConfig::validate() const {
  if (!std::isfinite(onset_phase_deg) || !std::isfinite(offset_phase_deg)) {
    throw std::invalid_argument("scheduler: phase targets must be finite");
  }
  if (dsp::circ_dist(onset_phase_deg, offset_phase_deg) < 1e-9) {
    throw std::invalid_argument("scheduler: onset and offset phases must differ (mod 360)");
  }
  if (!(session_duration_s > 0.0) || !std::isfinite(session_duration_s)) {
    throw std::invalid_argument("scheduler: session_duration_s must be positive");
  }
  if (!(min_inter_onset_s >= 0.0) || !(warmup_s >= 0.0)) {
    throw std::invalid_argument("scheduler: min_inter_onset_s and warmup_s must be >= 0");
  }
  stimulus.validate();
}

void LatencyModel::validate() const {
  if (!(pipeline_delay_s >= 0.0) || !(extra_output_delay_s >= 0.0) || !std::isfinite(total_delay_s())) {
    throw std::invalid_argument("latency: delays must be finite and >= 0");
  }
}

double stim_onset_phase(double erp_target_phase_deg, double p1_latency_s, double iaf_hz) {
  if (!std::isfinite(erp_target_phase_deg) || !std::isfinite(p1_latency_s) || !std::isfinite(iaf_hz)) {
    throw std::invalid_argument("stim_onset_phase: inputs must be finite");
  }
  if (p1_latency_s < 0.0 || !(iaf_hz > 0.0)) {
    throw std::invalid_argument("stim_onset_phase: need p1_latency >= 0 and iaf > 0");
  }
  return dsp::wrap360(erp_target_phase_deg - 360.0 * p1_latency_s * iaf_hz);
}

double phase_advance(const LatencyModel& latency, double inst_freq_hz) {
  return 360.0 * inst_freq_hz * latency.total_delay_s();
}

}  // namespace alphaloop::loop
