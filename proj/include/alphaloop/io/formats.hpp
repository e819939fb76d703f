#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "alphaloop/analysis/sleep.hpp"
#include "alphaloop/loop/session.hpp"
#include "alphaloop/recording.hpp"

namespace alphaloop::io {

inline constexpr int kFormatVersion = 1;

struct RecordingData {
  EegRecording recording;
  std::optional<GroundTruthPhase> truth;
};

/// Columns: sample, one per channel label, then truth_phase_deg and
/// truth_amp_uv when ground truth is present. Values at full precision.
void write_recording(const std::filesystem::path& path, const EegRecording& rec, const GroundTruthPhase* truth = nullptr);
/// Throws ParseError on malformed headers, non-contiguous sample indices,
/// or a sample rate different from `expected_rate_hz` when given.
RecordingData read_recording(const std::filesystem::path& path, std::optional<double> expected_rate_hz = std::nullopt);

/// Angles at 4 decimals, times at full precision; truth column left empty
/// for events without ground truth.
void write_event_log(const std::filesystem::path& path, const loop::StimEventLog& log,
                     const loop::SchedulerConfig* sched = nullptr);
/// Throws ParseError when fire times do not strictly increase.
loop::StimEventLog read_event_log(const std::filesystem::path& path);

void write_phase_log(const std::filesystem::path& path, const loop::StimEventLog& log);
std::vector<loop::PhaseLogEntry> read_phase_log(const std::filesystem::path& path);

void write_hypnogram(const std::filesystem::path& path, const analysis::Hypnogram& h);
/// Throws ParseError on unknown stages or non-contiguous epoch indices.
analysis::Hypnogram read_hypnogram(const std::filesystem::path& path);

void write_stim_times(const std::filesystem::path& path, const std::vector<double>& times_s);
std::vector<double> read_stim_times(const std::filesystem::path& path);

}  // namespace alphaloop::io
