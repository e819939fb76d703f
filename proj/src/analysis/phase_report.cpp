#include "alphaloop/analysis/phase_report.hpp"

#include <stdexcept>
#include <string>

#include "alphaloop/dsp/angles.hpp"

namespace alphaloop::analysis {

const KindAccuracy& PhaseAccuracyReport::get(loop::EventKind k) const {
  for (const auto& row : kinds)
    if (row.kind == k) return row;
  throw std::out_of_range("phase report has no '" + std::string(loop::to_string(k)) + "' row");
}

KindAccuracy kind_accuracy(loop::EventKind kind, std::span<const double> measured_deg, double target_deg) {
  KindAccuracy row;
  row.kind = kind;
  row.target_deg = dsp::wrap360(target_deg);
  row.stats = dsp::circ_stats(measured_deg);
  row.n_events = row.stats.n;
  // Mean of (target − θ) is target − mean(θ); its spread equals that of θ.
  row.error_mean_deg = dsp::circ_diff(row.target_deg, row.stats.mean_deg);
  row.error_sd_deg = row.stats.angular_deviation_deg;
  return row;
}

PhaseAccuracyReport phase_accuracy(const loop::StimEventLog& log, double onset_target_deg, double offset_target_deg,
                                   PhaseSource source) {
  if (log.events.empty()) throw std::invalid_argument("phase_accuracy: event log is empty");
  PhaseAccuracyReport rep;
  rep.source = source;
  for (auto kind : {loop::EventKind::Onset, loop::EventKind::Offset}) {
    const auto angles = source == PhaseSource::Truth ? log.truth_phases(kind) : log.estimated_phases(kind);
    if (angles.empty()) continue;
    rep.kinds.push_back(kind_accuracy(kind, angles, kind == loop::EventKind::Onset ? onset_target_deg : offset_target_deg));
  }
  if (rep.kinds.empty()) throw std::invalid_argument("phase_accuracy: no events carry the requested phase source");
  return rep;
}

}  // namespace alphaloop::analysis
