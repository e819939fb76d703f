#include "alphaloop/analysis/sleep.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "alphaloop/errors.hpp"

namespace alphaloop::analysis {

std::string_view to_string(SleepStage s) {
  switch (s) {
    case SleepStage::W: return "W";
    case SleepStage::N1: return "N1";
    case SleepStage::N2: return "N2";
    case SleepStage::N3: return "N3";
    case SleepStage::REM: return "REM";
    case SleepStage::IND: return "IND";
  }
  return "?";
}

SleepStage sleep_stage_from_string(std::string_view s) {
  if (s == "W") return SleepStage::W;
  if (s == "N1") return SleepStage::N1;
  if (s == "N2") return SleepStage::N2;
  if (s == "N3") return SleepStage::N3;
  if (s == "REM" || s == "R") return SleepStage::REM;
  if (s == "IND") return SleepStage::IND;
  throw std::invalid_argument("unknown sleep stage '" + std::string(s) + "'");
}

void Hypnogram::validate() const {
  if (stages.empty()) throw std::invalid_argument("hypnogram: no epochs");
  if (!(epoch_duration_s > 0.0) || !std::isfinite(epoch_duration_s)) {
    throw std::invalid_argument("hypnogram: epoch duration must be positive");
  }
}

double sol_n2(const Hypnogram& h) {
  h.validate();
  for (std::size_t i = 0; i < h.stages.size(); ++i) {
    if (h.stages[i] == SleepStage::N2) return static_cast<double>(i) * h.epoch_duration_s / 60.0;
  }
  throw NoN2Error("sol_n2: hypnogram of " + std::to_string(h.stages.size()) + " epochs has no N2 epoch");
}

std::array<double, kSleepStageCount> stage_minutes(const Hypnogram& h) {
  h.validate();
  std::array<double, kSleepStageCount> out{};
  for (SleepStage s : h.stages) out[static_cast<std::size_t>(s)] += h.epoch_duration_s / 60.0;
  return out;
}

std::optional<double> weekly_mean(std::span<const std::optional<double>> nights) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : nights) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace alphaloop::analysis
