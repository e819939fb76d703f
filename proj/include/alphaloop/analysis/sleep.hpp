#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace alphaloop::analysis {

enum class SleepStage { W, N1, N2, N3, REM, IND };
inline constexpr std::size_t kSleepStageCount = 6;

std::string_view to_string(SleepStage s);
/// Accepts W, N1, N2, N3, REM, IND (also R for REM).
SleepStage sleep_stage_from_string(std::string_view s);

struct Hypnogram {
  double epoch_duration_s = 30.0;
  std::vector<SleepStage> stages;

  void validate() const;
  double duration_min() const { return static_cast<double>(stages.size()) * epoch_duration_s / 60.0; }
};

/// Minutes from record start to the first N2 epoch. Throws NoN2Error.
double sol_n2(const Hypnogram& h);

/// Minutes spent in each stage, indexed by SleepStage.
std::array<double, kSleepStageCount> stage_minutes(const Hypnogram& h);

/// Mean over the nights that have a value; nullopt when none do.
std::optional<double> weekly_mean(std::span<const std::optional<double>> nights);

}  // namespace alphaloop::analysis
