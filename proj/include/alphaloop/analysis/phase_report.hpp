#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "alphaloop/dsp/circular.hpp"
#include "alphaloop/loop/session.hpp"

namespace alphaloop::analysis {

/// Accuracy of one event kind against its target. Signed error is
/// target − measured in (−180°, 180°].
struct KindAccuracy {
  loop::EventKind kind = loop::EventKind::Onset;
  double target_deg = 0.0;
  std::size_t n_events = 0;
  dsp::CircularStats stats;
  double error_mean_deg = 0.0;
  double error_sd_deg = 0.0;
};

enum class PhaseSource { Truth, Estimated };

struct PhaseAccuracyReport {
  PhaseSource source = PhaseSource::Truth;
  std::vector<KindAccuracy> kinds;

  const KindAccuracy& get(loop::EventKind k) const;
};

KindAccuracy kind_accuracy(loop::EventKind kind, std::span<const double> measured_deg, double target_deg);

/// One row per event kind present in the log. Truth source uses only events
/// with a recorded ground-truth phase. Throws std::invalid_argument on an
/// empty log.
PhaseAccuracyReport phase_accuracy(const loop::StimEventLog& log, double onset_target_deg, double offset_target_deg,
                                   PhaseSource source = PhaseSource::Truth);

}  // namespace alphaloop::analysis
