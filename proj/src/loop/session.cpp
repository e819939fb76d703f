#include "alphaloop/loop/session.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/sim/synth.hpp"

namespace alphaloop::loop {

using dsp::wrap180;
using dsp::wrap360;

LoopConfig LoopConfig::defaults(double iaf_hz, double fs) {
  LoopConfig cfg;
  cfg.echt.window_samples = static_cast<std::size_t>(std::llround(fs));
  cfg.echt.band = dsp::BandpassSpec{iaf_hz, 2.0, 2, fs, dsp::BandCentering::Center};
  cfg.preprocess = dsp::BandpassSpec::from_edges(2.5, 35.0, 2, fs);
  return cfg;
}

void LoopConfig::validate() const {
  echt.validate();
  preprocess.validate();
  scheduler.validate();
  latency.validate();
  if (std::abs(preprocess.sample_rate - echt.band.sample_rate) > 1e-9) {
    throw std::invalid_argument("loop config: preprocessing and ecHT sample rates differ");
  }
  if (!(channels.rms_window_s > 0.0) || !(channels.switch_threshold_uv >= 0.0)) {
    throw std::invalid_argument("loop config: rms_window_s must be > 0 and switch threshold >= 0");
  }
  if (!(freq_smoothing_s > 0.0)) throw std::invalid_argument("loop config: freq_smoothing_s must be > 0");
}

std::vector<double> StimEventLog::truth_phases(EventKind kind) const {
  std::vector<double> out;
  for (const auto& e : events)
    if (e.kind == kind && e.truth_phase_deg) out.push_back(*e.truth_phase_deg);
  return out;
}

std::vector<double> StimEventLog::estimated_phases(EventKind kind) const {
  std::vector<double> out;
  for (const auto& e : events)
    if (e.kind == kind) out.push_back(e.estimated_phase_deg);
  return out;
}

std::size_t StimEventLog::count(EventKind kind) const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [kind](const StimEvent& e) { return e.kind == kind; }));
}

void SessionEngine::Ring::push(double v, std::size_t n) {
  buf[head] = v;
  buf[head + n] = v;
  head = (head + 1) % n;
  if (filled < n) ++filled;
}

SessionEngine::SessionEngine(LoopConfig cfg, std::size_t num_channels)
    : cfg_(std::move(cfg)), fs_(cfg_.sample_rate()), nch_(num_channels), est_((cfg_.validate(), cfg_.echt)) {
  if (nch_ < 1 || nch_ > 3) throw std::invalid_argument("session: 1 to 3 channels required");
  const auto pre = dsp::design_bandpass(cfg_.preprocess);
  pre_.assign(nch_, dsp::SosFilter(pre));
  rings_.resize(nch_);
  for (auto& r : rings_) r.buf.assign(2 * est_.window_size(), 0.0);
  block_ss_.assign(nch_, 0.0);
  block_len_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg_.channels.rms_window_s * fs_)));
  quality_.rms_uv.assign(nch_, std::nullopt);
  quality_.switch_threshold_uv = cfg_.channels.switch_threshold_uv;
  quality_.active_channel = std::min(cfg_.channels.initial_channel, nch_ - 1);

  const double fc = cfg_.echt.band.center_hz;
  pre_center_phase_deg_ = pre.phase_deg_at(fc);
  pre_center_gain_ = pre.gain_at(fc);

  dphi_.assign(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg_.freq_smoothing_s * fs_))), 0.0);
  log_.condition = cfg_.scheduler.condition;
  log_.sample_rate_hz = fs_;
}

void SessionEngine::update_quality() {
  for (std::size_t c = 0; c < nch_; ++c) {
    quality_.rms_uv[c] = std::sqrt(block_ss_[c] / static_cast<double>(block_len_));
    block_ss_[c] = 0.0;
  }
  block_fill_ = 0;
  if (nch_ < 2) return;
  const std::size_t next = select_channel(quality_);
  if (next != quality_.active_channel) {
    quality_.active_channel = next;
    log_.channel_switches.emplace_back(static_cast<double>(n_) / fs_, next);
    prev_raw_.reset();
    prev_comp_.reset();
  }
}

double SessionEngine::smoothed_freq() const {
  const auto& band = cfg_.echt.band;
  if (dphi_count_ == 0) return band.center_hz;
  const double f = dphi_sum_ / static_cast<double>(dphi_count_) * fs_ / 360.0;
  return std::clamp(f, band.low_hz(), band.high_hz());
}

std::optional<StimEvent> SessionEngine::push(std::span<const double> frame) {
  if (frame.size() != nch_) throw std::invalid_argument("session: frame has wrong channel count");
  const double t = static_cast<double>(n_) / fs_;
  const std::size_t nwin = est_.window_size();
  for (std::size_t c = 0; c < nch_; ++c) {
    if (!std::isfinite(frame[c])) throw std::invalid_argument("session: non-finite sample");
    const double y = pre_[c].process(frame[c]);
    rings_[c].push(y, nwin);
    block_ss_[c] += y * y;
  }
  ++n_;
  if (++block_fill_ == block_len_) update_quality();

  const std::size_t ch = quality_.active_channel;
  const Ring& ring = rings_[ch];
  if (ring.filled < nwin) return std::nullopt;

  const dsp::cplx z = est_.endpoint(ring.window());
  const double raw = wrap360(dsp::rad2deg(std::arg(z)));
  if (prev_raw_) {
    const double d = wrap180(raw - *prev_raw_);
    if (dphi_count_ == dphi_.size()) {
      dphi_sum_ -= dphi_[dphi_head_];
    } else {
      ++dphi_count_;
    }
    dphi_[dphi_head_] = d;
    dphi_sum_ += d;
    dphi_head_ = (dphi_head_ + 1) % dphi_.size();
    net_phase_ += d;
  }
  prev_raw_ = raw;

  const double f = smoothed_freq();
  double phase = raw;
  double amp = std::abs(z);
  switch (cfg_.correction) {
    case PhaseCorrection::None: break;
    case PhaseCorrection::Center:
      phase = raw - pre_center_phase_deg_;
      amp /= pre_center_gain_;
      break;
    case PhaseCorrection::Tracked: {
      const auto hp = pre_.front().coefficients().response_at(f);
      const auto he = est_.filter().response_at(f);
      phase = raw - dsp::rad2deg(std::arg(hp * he));
      amp /= std::abs(hp * he);
      break;
    }
  }
  phase = wrap360(phase);
  // The newest sample is at time t; the estimate describes that instant.
  last_ = dsp::PhaseEstimate{phase, amp, f};
  if (cfg_.log_phase) log_.phase_log.push_back({t, ch, phase, amp, f});

  auto ev = schedule(t, phase, f);
  if (ev) {
    ev->channel_used = ch;
    log_.events.push_back(*ev);
  }
  return ev;
}

std::optional<StimEvent> SessionEngine::schedule(double t, double phase, double freq) {
  const auto& sc = cfg_.scheduler;
  if (sc.condition == Condition::NoAudio) return std::nullopt;

  const double rate = 360.0 * freq;  // degrees per second
  const double comp = wrap360(phase + rate * cfg_.latency.compensated_delay_s());
  const double target = armed_ == EventKind::Onset ? sc.onset_phase_deg : sc.offset_phase_deg;
  const double step = rate / fs_;

  std::optional<double> decision;
  double est = comp;
  const double ahead = wrap360(target - comp);
  if (ahead < step) {
    // Crossing predicted before the next sample arrives.
    decision = t + ahead / rate;
    est = target;
  } else if (prev_comp_) {
    const double moved = wrap360(comp - *prev_comp_);
    const double to_target = wrap360(target - *prev_comp_);
    if (moved > 0.0 && moved < 180.0 && to_target > 0.0 && to_target <= moved) decision = t;  // missed
  }
  prev_comp_ = comp;
  if (!decision) return std::nullopt;
  if (*decision >= sc.session_duration_s || *decision <= last_fire_) return std::nullopt;

  if (armed_ == EventKind::Onset) {
    if (*decision < sc.warmup_s) return std::nullopt;
    if (last_onset_time_) {
      if (*decision - *last_onset_time_ < sc.min_inter_onset_s) return std::nullopt;
      if (net_phase_ - last_onset_net_ < 180.0) return std::nullopt;
    }
    last_onset_time_ = *decision;
    last_onset_net_ = net_phase_;
  }

  StimEvent e;
  e.kind = armed_;
  e.decision_time_s = *decision;
  e.fire_time_s = *decision + cfg_.latency.total_delay_s();
  e.target_phase_deg = wrap360(target);
  e.estimated_phase_deg = wrap360(est);
  last_fire_ = *decision;
  armed_ = armed_ == EventKind::Onset ? EventKind::Offset : EventKind::Onset;
  return e;
}

void SessionEngine::finish() {
  if (!log_.events.empty() && log_.events.back().kind == EventKind::Onset) log_.events.pop_back();
}

StimEventLog run_closed_loop(const EegRecording& recording, const GroundTruthPhase* truth, const LoopConfig& cfg) {
  recording.validate();
  cfg.validate();
  const double fs = recording.sample_rate_hz;
  if (std::abs(fs - cfg.sample_rate()) > 1e-9) {
    throw std::invalid_argument("run_closed_loop: recording sample rate " + std::to_string(fs) +
                                " Hz does not match configured " + std::to_string(cfg.sample_rate()) + " Hz");
  }
  const auto n_session = static_cast<std::size_t>(std::llround(cfg.scheduler.session_duration_s * fs));
  if (n_session > recording.num_samples()) {
    throw std::invalid_argument("run_closed_loop: stream underrun, session needs " + std::to_string(n_session) +
                                " samples but the input has " + std::to_string(recording.num_samples()));
  }
  if (truth && truth->size() != recording.num_samples()) {
    throw std::invalid_argument("run_closed_loop: ground truth length differs from the recording");
  }

  SessionEngine engine(cfg, recording.num_channels());
  std::vector<double> frame(recording.num_channels());
  for (std::size_t i = 0; i < n_session; ++i) {
    for (std::size_t c = 0; c < frame.size(); ++c) frame[c] = recording.channels[c][i];
    engine.push(frame);
  }
  engine.finish();

  StimEventLog log = std::move(engine.log());
  if (truth) {
    const double end = recording.duration_s();
    for (auto& e : log.events) {
      if (e.fire_time_s < end) e.truth_phase_deg = sim::truth_phase_at(*truth, fs, e.fire_time_s);
    }
  }
  return log;
}

StimEventLog run_closed_loop(const sim::SimTrace& trace, const LoopConfig& cfg) {
  return run_closed_loop(trace.recording, &trace.truth, cfg);
}

}  // namespace alphaloop::loop
