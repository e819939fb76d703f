#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace alphaloop::loop {

enum class Condition { NoAudio, PeakLocked, TroughLocked };
std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view s);

struct StimulusSpec {
  double pulse_duration_s = 0.012;
  double pulse_level_db_spl = 65.0;
  double background_level_db_spl = 47.0;
  double snr_db = 18.0;

  void validate() const;
};

struct SchedulerConfig {
  Condition condition = Condition::PeakLocked;
  double onset_phase_deg = 314.0;
  double offset_phase_deg = 44.0;
  double session_duration_s = 1800.0;
  double min_inter_onset_s = 0.0;
  /// No events before this time: filter settling plus the first ecHT window.
  double warmup_s = 2.0;
  StimulusSpec stimulus;

  /// Default phase targets: trough 134°/224°, peak 314°/44°.
  static SchedulerConfig for_condition(Condition c);
  void validate() const;
};

/// Output-path delays. The pipeline delay is a fixed device characteristic and
/// is always compensated; `compensate` controls whether the scheduler also
/// advances for the extra output delay.
struct LatencyModel {
  double pipeline_delay_s = 0.0014;
  double extra_output_delay_s = 0.0;
  bool compensate = true;

  double total_delay_s() const { return pipeline_delay_s + extra_output_delay_s; }
  double compensated_delay_s() const { return compensate ? total_delay_s() : pipeline_delay_s; }
  void validate() const;
};

enum class EventKind { Onset, Offset };
std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

struct StimEvent {
  EventKind kind = EventKind::Onset;
  double decision_time_s = 0.0;
  /// Physical output time: decision time plus the total output delay.
  double fire_time_s = 0.0;
  double target_phase_deg = 0.0;
  /// Estimated phase projected to the fire time.
  double estimated_phase_deg = 0.0;
  std::optional<double> truth_phase_deg;
  std::size_t channel_used = 0;
};

/// Stimulus onset phase such that P1, arriving p1_latency_s later, lands on
/// erp_target_phase_deg of an oscillation at iaf_hz.
double stim_onset_phase(double erp_target_phase_deg, double p1_latency_s, double iaf_hz);

/// Phase (degrees) traversed at inst_freq_hz during the model's total delay.
double phase_advance(const LatencyModel& latency, double inst_freq_hz);

}  // namespace alphaloop::loop
