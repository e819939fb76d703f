#pragma once

#include <cstddef>
#include <cstdint>

namespace alphaloop::io {

struct BenchConfig {
  double duration_s = 1800.0;
  double sample_rate_hz = 250.0;
  std::size_t channels = 3;
  /// Independent sessions run concurrently (one per OpenMP thread).
  std::size_t sessions = 1;
  double alpha_snr_db = 0.0;
  std::uint64_t seed = 1;
  double budget_s = 0.0014;
  double min_realtime_factor = 100.0;
};

struct LatencyStats {
  double mean_us = 0.0;
  double p50_us = 0.0;
  double p99_us = 0.0;
  double max_us = 0.0;
  /// Fraction of samples whose processing exceeded the budget.
  double over_budget_fraction = 0.0;
};

struct BenchReport {
  BenchConfig config;
  std::size_t samples_per_session = 0;
  std::size_t events = 0;
  int threads = 1;
  /// Time spent inside the closed-loop path, summed over sessions
  /// (generation excluded).
  double wall_s = 0.0;
  /// Stream-seconds processed per second of processing time on one core.
  double realtime_factor = 0.0;
  LatencyStats latency;

  bool meets_realtime() const { return realtime_factor >= config.min_realtime_factor; }
  bool meets_budget() const { return latency.p99_us * 1e-6 <= config.budget_s; }
};

/// Synthesizes each session's stream, then times every per-sample push
/// through the session engine.
BenchReport run_bench(const BenchConfig& cfg);

}  // namespace alphaloop::io
