#include "alphaloop/io/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <vector>

#include "alphaloop/loop/session.hpp"
#include "alphaloop/sim/rng.hpp"
#include "alphaloop/sim/synth.hpp"

namespace alphaloop::io {

namespace {

struct SessionResult {
  std::vector<float> latency_us;
  std::size_t events = 0;
  double wall_s = 0.0;
};

SessionResult run_one(const BenchConfig& cfg, std::size_t index) {
  sim::SynthConfig sc;
  sc.duration_s = cfg.duration_s;
  sc.sample_rate = cfg.sample_rate_hz;
  sc.noise.alpha_snr_db = cfg.alpha_snr_db;
  sc.oscillator.seed = sim::derive_seed(cfg.seed, 2 * index);
  sc.noise_seed = sim::derive_seed(cfg.seed, 2 * index + 1);
  const sim::SimTrace tr = sim::synth_recording(sc);
  const auto& rec = tr.recording;

  loop::LoopConfig lc = loop::LoopConfig::defaults(sc.oscillator.base_freq_hz, cfg.sample_rate_hz);
  lc.scheduler.session_duration_s = cfg.duration_s;
  lc.log_phase = false;
  const std::size_t nch = std::min(cfg.channels, rec.num_channels());
  loop::SessionEngine engine(lc, nch);

  SessionResult r;
  const std::size_t n = rec.num_samples();
  r.latency_us.resize(n);
  std::vector<double> frame(nch);
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < nch; ++c) frame[c] = rec.channels[c][i];
    const auto t0 = clock::now();
    engine.push(frame);
    const auto t1 = clock::now();
    r.latency_us[i] = static_cast<float>(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  r.wall_s = std::chrono::duration<double>(clock::now() - start).count();
  engine.finish();
  r.events = engine.log().events.size();
  return r;
}

}  // namespace

BenchReport run_bench(const BenchConfig& cfg) {
  if (!(cfg.duration_s >= 2.0) || cfg.sessions < 1 || cfg.channels < 1 || cfg.channels > 3) {
    throw std::invalid_argument("bench: need duration >= 2 s, >= 1 session, 1 to 3 channels");
  }
  std::vector<SessionResult> results(cfg.sessions);
  BenchReport rep;
  rep.config = cfg;
  const auto ns = static_cast<std::ptrdiff_t>(cfg.sessions);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < ns; ++s) results[static_cast<std::size_t>(s)] = run_one(cfg, static_cast<std::size_t>(s));
  rep.threads = std::min<int>(omp_get_max_threads(), static_cast<int>(cfg.sessions));

  std::vector<float> all;
  for (const auto& r : results) {
    all.insert(all.end(), r.latency_us.begin(), r.latency_us.end());
    rep.events += r.events;
    rep.wall_s += r.wall_s;
    rep.samples_per_session = r.latency_us.size();
  }
  rep.realtime_factor = cfg.duration_s * static_cast<double>(cfg.sessions) / rep.wall_s;

  double sum = 0.0;
  std::size_t over = 0;
  for (float v : all) {
    sum += v;
    over += (v * 1e-6 > cfg.budget_s) ? 1 : 0;
  }
  const auto pct = [&all](double q) {
    const auto k = static_cast<std::size_t>(q * static_cast<double>(all.size() - 1));
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    return static_cast<double>(all[k]);
  };
  rep.latency.mean_us = sum / static_cast<double>(all.size());
  rep.latency.max_us = *std::max_element(all.begin(), all.end());
  rep.latency.p50_us = pct(0.50);
  rep.latency.p99_us = pct(0.99);
  rep.latency.over_budget_fraction = static_cast<double>(over) / static_cast<double>(all.size());
  return rep;
}

}  // namespace alphaloop::io
