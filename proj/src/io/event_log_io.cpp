#include <stdexcept>
#include <string>

#include "alphaloop/errors.hpp"
#include "alphaloop/io/formats.hpp"
#include "alphaloop/io/text_format.hpp"

namespace alphaloop::io {

namespace {
constexpr const char* kEventFormat = "alphaloop.events";
constexpr const char* kPhaseLogFormat = "alphaloop.phaselog";
constexpr const char* kStimTimesFormat = "alphaloop.stimtimes";
constexpr int kAngleDecimals = 4;
}  // namespace

void write_event_log(const std::filesystem::path& path, const loop::StimEventLog& log, const loop::SchedulerConfig* sched) {
  TableHeader h;
  h.format = kEventFormat;
  h.version = kFormatVersion;
  h.meta.emplace_back("condition", std::string(loop::to_string(log.condition)));
  h.meta.emplace_back("sample_rate_hz", format_double(log.sample_rate_hz));
  if (sched) {
    h.meta.emplace_back("onset_target_deg", format_fixed(sched->onset_phase_deg, kAngleDecimals));
    h.meta.emplace_back("offset_target_deg", format_fixed(sched->offset_phase_deg, kAngleDecimals));
  }
  h.meta.emplace_back("n_events", std::to_string(log.events.size()));
  h.columns = {"kind", "decision_time_s", "fire_time_s", "target_deg", "estimated_deg", "truth_deg", "channel_used"};
  TableWriter w(path, h);
  for (const auto& e : log.events) {
    w.row({std::string(loop::to_string(e.kind)), format_double(e.decision_time_s), format_double(e.fire_time_s),
           format_fixed(e.target_phase_deg, kAngleDecimals), format_fixed(e.estimated_phase_deg, kAngleDecimals),
           e.truth_phase_deg ? format_fixed(*e.truth_phase_deg, kAngleDecimals) : std::string(),
           std::to_string(e.channel_used)});
  }
  w.close();
}

loop::StimEventLog read_event_log(const std::filesystem::path& path) {
  TableReader r(path, kEventFormat, kFormatVersion);
  const auto& h = r.header();
  loop::StimEventLog log;
  try {
    log.condition = loop::condition_from_string(h.get("condition"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  log.sample_rate_hz = parse_double(h.get("sample_rate_hz"), 0);
  const char* required[] = {"kind", "decision_time_s", "fire_time_s", "target_deg", "estimated_deg", "truth_deg", "channel_used"};
  for (std::size_t i = 0; i < std::size(required); ++i) {
    if (i >= h.columns.size() || h.columns[i] != required[i]) {
      throw ParseError(path.string() + ": expected column '" + required[i] + "' at position " + std::to_string(i + 1), r.line());
    }
  }
  std::vector<std::string_view> f;
  while (r.next(f)) {
    loop::StimEvent e;
    try {
      e.kind = loop::event_kind_from_string(f[0]);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(path.string() + ": " + ex.what(), r.line());
    }
    e.decision_time_s = parse_double(f[1], r.line());
    e.fire_time_s = parse_double(f[2], r.line());
    e.target_phase_deg = parse_double(f[3], r.line());
    e.estimated_phase_deg = parse_double(f[4], r.line());
    if (!f[5].empty()) e.truth_phase_deg = parse_double(f[5], r.line());
    const long long ch = parse_int(f[6], r.line());
    if (ch < 0) throw ParseError(path.string() + ": negative channel index", r.line());
    e.channel_used = static_cast<std::size_t>(ch);
    if (!log.events.empty() && !(e.fire_time_s > log.events.back().fire_time_s)) {
      throw ParseError(path.string() + ": fire times must strictly increase", r.line());
    }
    log.events.push_back(e);
  }
  return log;
}

void write_phase_log(const std::filesystem::path& path, const loop::StimEventLog& log) {
  TableHeader h;
  h.format = kPhaseLogFormat;
  h.version = kFormatVersion;
  h.meta.emplace_back("sample_rate_hz", format_double(log.sample_rate_hz));
  h.columns = {"time_s", "channel", "phase_deg", "amplitude_uv", "inst_freq_hz"};
  TableWriter w(path, h);
  for (const auto& p : log.phase_log) {
    w.row({format_double(p.time_s), std::to_string(p.channel), format_fixed(p.phase_deg, kAngleDecimals),
           format_double(p.amplitude_uv), format_double(p.inst_freq_hz)});
  }
  w.close();
}

std::vector<loop::PhaseLogEntry> read_phase_log(const std::filesystem::path& path) {
  TableReader r(path, kPhaseLogFormat, kFormatVersion);
  std::vector<loop::PhaseLogEntry> out;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    loop::PhaseLogEntry p;
    p.time_s = parse_double(f[0], r.line());
    p.channel = static_cast<std::size_t>(parse_int(f[1], r.line()));
    p.phase_deg = parse_double(f[2], r.line());
    p.amplitude_uv = parse_double(f[3], r.line());
    p.inst_freq_hz = parse_double(f[4], r.line());
    out.push_back(p);
  }
  return out;
}

void write_stim_times(const std::filesystem::path& path, const std::vector<double>& times_s) {
  TableHeader h;
  h.format = kStimTimesFormat;
  h.version = kFormatVersion;
  h.columns = {"stim_time_s"};
  TableWriter w(path, h);
  for (double t : times_s) w.row({format_double(t)});
  w.close();
}

std::vector<double> read_stim_times(const std::filesystem::path& path) {
  TableReader r(path, kStimTimesFormat, kFormatVersion);
  std::vector<double> out;
  std::vector<std::string_view> f;
  while (r.next(f)) out.push_back(parse_double(f[0], r.line()));
  return out;
}

}  // namespace alphaloop::io
