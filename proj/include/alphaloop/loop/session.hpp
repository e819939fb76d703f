#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "alphaloop/dsp/echt.hpp"
#include "alphaloop/dsp/iir.hpp"
#include "alphaloop/loop/quality.hpp"
#include "alphaloop/loop/scheduler.hpp"
#include "alphaloop/recording.hpp"

namespace alphaloop::sim {
struct SimTrace;
}

namespace alphaloop::loop {

/// Which filter phase lags are removed from the raw ecHT phase.
///  - None: raw estimate.
///  - Center: the preprocessing filter's lag at the ecHT band center.
///  - Tracked: preprocessing and ecHT band lags at the smoothed frequency.
enum class PhaseCorrection { None, Center, Tracked };

struct ChannelPolicy {
  double rms_window_s = 5.0;
  double switch_threshold_uv = 5.0;
  std::size_t initial_channel = 1;
};

struct LoopConfig {
  dsp::EchtConfig echt{};
  dsp::BandpassSpec preprocess = dsp::BandpassSpec::from_edges(2.5, 35.0, 2, 250.0);
  SchedulerConfig scheduler{};
  LatencyModel latency{};
  ChannelPolicy channels{};
  PhaseCorrection correction = PhaseCorrection::Center;
  /// Span over which the instantaneous frequency is averaged.
  double freq_smoothing_s = 1.0;
  bool log_phase = true;

  double sample_rate() const { return echt.band.sample_rate; }
  /// Points every band at `fs` and the ecHT band at `iaf_hz`.
  static LoopConfig defaults(double iaf_hz = 10.0, double fs = 250.0);
  void validate() const;
};

struct PhaseLogEntry {
  double time_s = 0.0;
  std::size_t channel = 0;
  double phase_deg = 0.0;
  double amplitude_uv = 0.0;
  double inst_freq_hz = 0.0;
};

struct StimEventLog {
  Condition condition = Condition::NoAudio;
  double sample_rate_hz = 0.0;
  std::vector<StimEvent> events;
  std::vector<PhaseLogEntry> phase_log;
  /// Times (s) and new index of each channel switch.
  std::vector<std::pair<double, std::size_t>> channel_switches;

  std::vector<double> truth_phases(EventKind kind) const;
  std::vector<double> estimated_phases(EventKind kind) const;
  std::size_t count(EventKind kind) const;
};

/// Per-sample streaming engine. Single owner; movable, not shareable.
class SessionEngine {
 public:
  SessionEngine(LoopConfig cfg, std::size_t num_channels);

  /// Ingests one multi-channel sample; returns the event decided during it.
  std::optional<StimEvent> push(std::span<const double> frame);

  /// Closes the session: drops a trailing onset that has no offset.
  void finish();

  const LoopConfig& config() const { return cfg_; }
  std::size_t samples_seen() const { return n_; }
  std::size_t active_channel() const { return quality_.active_channel; }
  const ChannelQualityState& quality() const { return quality_; }
  const std::optional<dsp::PhaseEstimate>& last_estimate() const { return last_; }

  StimEventLog& log() { return log_; }
  const StimEventLog& log() const { return log_; }

 private:
  struct Ring {
    std::vector<double> buf;
    std::size_t head = 0;
    std::size_t filled = 0;
    void push(double v, std::size_t n);
    const double* window() const { return buf.data() + head; }
  };

  void update_quality();
  double smoothed_freq() const;
  std::optional<StimEvent> schedule(double t, double phase, double freq);

  LoopConfig cfg_;
  double fs_;
  std::size_t nch_;
  dsp::EchtEstimator est_;
  std::vector<dsp::SosFilter> pre_;
  std::vector<Ring> rings_;
  std::vector<double> block_ss_;
  std::size_t block_len_;
  std::size_t block_fill_ = 0;
  ChannelQualityState quality_;

  double pre_center_phase_deg_;
  double pre_center_gain_;

  std::vector<double> dphi_;
  std::size_t dphi_head_ = 0;
  std::size_t dphi_count_ = 0;
  double dphi_sum_ = 0.0;
  std::optional<double> prev_raw_;
  double net_phase_ = 0.0;

  EventKind armed_ = EventKind::Onset;
  std::optional<double> prev_comp_;
  std::optional<double> last_onset_time_;
  double last_onset_net_ = 0.0;
  double last_fire_ = -1.0;

  std::size_t n_ = 0;
  std::optional<dsp::PhaseEstimate> last_;
  StimEventLog log_;
};

/// Runs a whole session over a recording. Events fired inside the record get
/// truth_phase_deg from `truth` when supplied.
StimEventLog run_closed_loop(const EegRecording& recording, const GroundTruthPhase* truth, const LoopConfig& cfg);
StimEventLog run_closed_loop(const sim::SimTrace& trace, const LoopConfig& cfg);

}  // namespace alphaloop::loop
