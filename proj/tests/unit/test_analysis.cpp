#include <cmath>
#include <random>
#include <vector>

#include "alphaloop/analysis/erp.hpp"
#include "alphaloop/analysis/iaf.hpp"
#include "alphaloop/analysis/multitaper.hpp"
#include "alphaloop/analysis/phase_report.hpp"
#include "alphaloop/analysis/sleep.hpp"
#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/dsp/iir.hpp"
#include "alphaloop/sim/rng.hpp"
#include "alphaloop/errors.hpp"
#include "alphaloop/sim/synth.hpp"
#include "doctest.h"

using namespace alphaloop;
using namespace alphaloop::analysis;

namespace {

std::vector<double> stim_schedule(std::size_t count, double first, double spacing) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = first + spacing * static_cast<double>(i);
  return t;
}

// Random inter-stimulus intervals in [0.75, 1.25] s keep the oscillator out of phase lock.
std::vector<double> jittered_schedule(std::size_t count, double first, std::uint64_t seed) {
  sim::Rng rng(seed);
  std::vector<double> t(count);
  double at = first;
  for (auto& v : t) {
    v = at;
    at += 0.75 + 0.5 * rng.uniform();
  }
  return t;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("dpss tapers are orthonormal eigenvectors of the sinc concentration matrix") {
  const std::size_t n = 300;
  const double nw = 2.5;
  const auto v = dpss(n, nw, 4);
  REQUIRE(v.size() == 4);
  const double w = nw / static_cast<double>(n);
  std::vector<double> lambda;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += v[a][i] * v[b][i];
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }
    // A v = lambda v, A[i][j] = sin(2πW(i-j)) / (π(i-j)), diagonal 2W
    std::vector<double> av(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = static_cast<double>(i) - static_cast<double>(j);
        const double aij = i == j ? 2.0 * w : std::sin(2.0 * dsp::kPi * w * d) / (dsp::kPi * d);
        av[i] += aij * v[a][j];
      }
    }
    double l = 0.0;
    for (std::size_t i = 0; i < n; ++i) l += av[i] * v[a][i];
    for (std::size_t i = 0; i < n; ++i) CHECK(av[i] == doctest::Approx(l * v[a][i]).epsilon(1e-6).scale(1.0));
    lambda.push_back(l);
  }
  for (std::size_t a = 1; a < 4; ++a) CHECK(lambda[a] < lambda[a - 1]);
  CHECK(lambda[0] > 0.999);
  CHECK(lambda[3] > 0.9);
  // sign convention: even tapers positive sum, odd tapers start positive
  double s0 = 0.0;
  for (double x : v[0]) s0 += x;
  CHECK(s0 > 0.0);
  CHECK(v[1][0] > 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(v[0][i] == doctest::Approx(v[0][n - 1 - i]).epsilon(1e-8).scale(1.0));
    CHECK(v[1][i] == doctest::Approx(-v[1][n - 1 - i]).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("multitaper spectrogram: layout, calibration and parallel equivalence") {
  const double fs = 250.0;
  std::vector<double> x(250 * 30);
  std::mt19937_64 g(1);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 5.0 * std::cos(2.0 * dsp::kPi * 10.0 * static_cast<double>(i) / fs) + nd(g);
  SpectrogramConfig cfg;
  const auto s = multitaper_spectrogram_serial(x, fs, cfg);
  const auto p = multitaper_spectrogram(x, fs, cfg);
  CHECK(s.power == p.power);
  CHECK(s.times_s == p.times_s);
  const std::size_t win = 1500, step = static_cast<std::size_t>(std::llround(0.15 * fs));
  CHECK(s.n_times() == (x.size() - win) / step + 1);
  CHECK(s.times_s[0] == doctest::Approx(3.0 - 0.5 / fs).epsilon(1e-3));
  CHECK(s.times_s[1] - s.times_s[0] == doctest::Approx(step / fs));
  CHECK(s.freqs_hz.back() == doctest::Approx(fs / 2.0));
  const double df = s.freqs_hz[1] - s.freqs_hz[0];

  // Power integrated over the tone's bandwidth is A^2/2; the white part is 2σ²/fs per Hz.
  const auto med = median_spectrum(s);
  double tone = 0.0, total = 0.0;
  for (std::size_t b = 0; b < med.size(); ++b) {
    total += med[b] * df;
    if (std::abs(s.freqs_hz[b] - 10.0) <= 1.0) tone += (med[b] - 2.0 * 4.0 / fs) * df;
  }
  CHECK(tone == doctest::Approx(12.5).epsilon(0.05));
  CHECK(total == doctest::Approx(12.5 + 4.0).epsilon(0.05));
  double white = 0.0;
  std::size_t nb = 0;
  for (std::size_t b = 0; b < med.size(); ++b)
    if (s.freqs_hz[b] > 40.0 && s.freqs_hz[b] < 100.0) {
      white += s.at(1, b);
      ++nb;
    }
  CHECK(white / static_cast<double>(nb) == doctest::Approx(2.0 * 4.0 / fs).epsilon(0.1));

  SpectrogramConfig bad;
  bad.n_tapers = 6;
  CHECK_THROWS_AS(multitaper_spectrogram(x, fs, bad), std::invalid_argument);
  CHECK_THROWS_AS(multitaper_spectrogram(std::vector<double>(100, 0.0), fs, cfg), std::invalid_argument);
}

TEST_CASE("polyfit recovers an exact cubic") {
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    const double t = 0.1 * i - 1.0;
    x.push_back(t);
    y.push_back(1.5 - 2.0 * t + 0.25 * t * t + 3.0 * t * t * t);
  }
  const auto c = polyfit(x, y, 3);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == doctest::Approx(1.5));
  CHECK(c[1] == doctest::Approx(-2.0));
  CHECK(c[2] == doctest::Approx(0.25));
  CHECK(c[3] == doctest::Approx(3.0));
  CHECK_THROWS_AS(polyfit(std::span(x).first(3), std::span(y).first(3), 3), std::invalid_argument);
}

TEST_CASE("IAF recovers the oscillator frequency at 0 dB") {
  for (double f : {8.5, 10.3, 12.7}) {
    sim::SynthConfig sc;
    sc.duration_s = 120.0;
    sc.oscillator.base_freq_hz = f;
    sc.noise.alpha_snr_db = 0.0;
    const auto tr = sim::synth_recording(sc);
    const auto r = estimate_iaf(tr.recording.channels[1], 250.0);
    CHECK(r.iaf_hz == doctest::Approx(f).epsilon(0.25 / f));
    CHECK(r.peak_prominence > r.noise_floor);
    CHECK(r.freqs_hz.size() == r.median_power.size());
    CHECK(std::isnan(r.detrended.front()));
  }
}

TEST_CASE("IAF rejects pure pink noise and short records") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto x = sim::gen_pink_noise(250 * 120, 250.0, 10.0, seed);
    CHECK_THROWS_AS(estimate_iaf(x, 250.0), NoPeakError);
  }
  CHECK_THROWS_AS(estimate_iaf(std::vector<double>(250 * 30, 1.0), 250.0), std::invalid_argument);
}

TEST_CASE("ERP average recovers P1 latency") {
  for (double lat : {0.040, 0.0624, 0.070}) {
    sim::SynthConfig sc;
    sc.oscillator.amplitude_uv = 5.0;
    sc.noise.alpha_snr_db = 0.0;
    sc.erp.p1_latency_s = lat;
    sc.erp_stim_times_s = jittered_schedule(300, 1.0, 7);
    sc.duration_s = sc.erp_stim_times_s.back() + 1.0;
    const auto tr = sim::synth_recording(sc);
    const auto avg = epoch_erp(tr.recording.channels[1], 250.0, sc.erp_stim_times_s);
    CHECK(avg.kept + avg.rejected == 300);
    CHECK(avg.kept >= 250);
    CHECK(avg.times_s.front() == doctest::Approx(-0.252));
    CHECK(avg.times_s.back() == doctest::Approx(0.5));
    CHECK(avg.times_s.size() == 189);
    CHECK(detect_p1(avg) == doctest::Approx(lat).epsilon(0.002 / lat));
  }
}

TEST_CASE("ERP rejection matches an independent threshold count") {
  sim::SynthConfig sc;
  sc.duration_s = 150.0;
  sc.oscillator.amplitude_uv = 5.0;
  sc.noise.alpha_snr_db = 0.0;
  sc.erp_stim_times_s = stim_schedule(100, 1.0, 1.4);
  for (std::size_t i = 0; i < 100; i += 7) sc.blink_times_s.push_back(sc.erp_stim_times_s[i] + 0.2);
  sc.blink_peak_uv = 400.0;
  const auto tr = sim::synth_recording(sc);
  const auto& x = tr.recording.channels[1];
  const auto avg = epoch_erp(x, 250.0, sc.erp_stim_times_s);

  const auto filt = dsp::filtfilt(dsp::design_bandpass(dsp::BandpassSpec::from_edges(2.0, 30.0, 2, 250.0)), x);
  std::size_t over = 0;
  for (double t : sc.erp_stim_times_s) {
    const long long c = std::llround(t * 250.0);
    double peak = 0.0;
    for (long long i = c - 63; i <= c + 125; ++i) peak = std::max(peak, std::abs(filt[static_cast<std::size_t>(i)]));
    if (peak > 100.0) ++over;
  }
  CHECK(over >= sc.blink_times_s.size());
  CHECK(avg.rejected == over);
  CHECK(avg.kept == 100 - over);
  CHECK(avg.excluded == 0);

  const std::vector<double> edge{0.1, 149.9, 50.7};
  const auto e = epoch_erp(x, 250.0, edge);
  CHECK(e.excluded == 2);
  CHECK(e.kept == 1);
}

TEST_CASE("P1 detection edge cases") {
  ErpAverage avg;
  avg.sample_rate_hz = 1000.0;
  for (int i = -250; i <= 500; ++i) avg.times_s.push_back(i / 1000.0);
  avg.waveform.assign(avg.times_s.size(), -1.0);
  avg.kept = 1;
  CHECK_THROWS_AS(detect_p1(avg), NoPositivePeakError);
  for (std::size_t i = 0; i < avg.waveform.size(); ++i) avg.waveform[i] = avg.times_s[i];  // rising ramp
  CHECK_THROWS_AS(detect_p1(avg), NoPositivePeakError);
  for (std::size_t i = 0; i < avg.waveform.size(); ++i) {
    const double z = (avg.times_s[i] - 0.050) / 0.01;
    avg.waveform[i] = std::exp(-0.5 * z * z);
  }
  CHECK(detect_p1(avg) == doctest::Approx(0.050));
}

TEST_CASE("phase accuracy report conventions") {
  const std::vector<double> a{320.0, 330.0, 325.0};
  const auto k = kind_accuracy(loop::EventKind::Onset, a, 314.0);
  CHECK(k.n_events == 3);
  CHECK(k.stats.mean_deg == doctest::Approx(325.0).epsilon(1e-6));
  CHECK(k.error_mean_deg == doctest::Approx(-11.0).epsilon(1e-6));
  CHECK(k.error_sd_deg == doctest::Approx(k.stats.angular_deviation_deg));

  loop::StimEventLog log;
  for (int i = 0; i < 4; ++i) {
    loop::StimEvent on{loop::EventKind::Onset, 1.0 * i, 1.0 * i, 314.0, 314.0, 310.0, 1};
    loop::StimEvent off{loop::EventKind::Offset, 1.0 * i + 0.5, 1.0 * i + 0.5, 44.0, 44.0, 50.0, 1};
    log.events.push_back(on);
    log.events.push_back(off);
  }
  const auto rep = phase_accuracy(log, 314.0, 44.0);
  CHECK(rep.get(loop::EventKind::Onset).error_mean_deg == doctest::Approx(4.0));
  CHECK(rep.get(loop::EventKind::Offset).error_mean_deg == doctest::Approx(-6.0));
  const auto est = phase_accuracy(log, 314.0, 44.0, PhaseSource::Estimated);
  CHECK(est.get(loop::EventKind::Onset).error_mean_deg == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("SOL to N2 on constructed hypnograms") {
  using S = SleepStage;
  Hypnogram h;
  h.stages = {S::W, S::W, S::N1, S::W, S::N1, S::N1, S::N2, S::N2, S::N3};
  CHECK(sol_n2(h) == doctest::Approx(3.0));  // 6 epochs of 30 s
  h.stages = {S::N2};
  CHECK(sol_n2(h) == 0.0);
  h.stages = {S::W, S::REM, S::N3, S::N2};
  CHECK(sol_n2(h) == doctest::Approx(1.5));
  h.epoch_duration_s = 20.0;
  CHECK(sol_n2(h) == doctest::Approx(1.0));
  h.stages = {S::W, S::N1, S::N1};
  CHECK_THROWS_AS(sol_n2(h), NoN2Error);
  h.stages.clear();
  CHECK_THROWS_AS(sol_n2(h), std::invalid_argument);

  Hypnogram m;
  m.stages = {S::W, S::W, S::N1, S::N2, S::N2, S::N2, S::REM, S::IND};
  const auto mins = stage_minutes(m);
  CHECK(mins[static_cast<std::size_t>(S::W)] == doctest::Approx(1.0));
  CHECK(mins[static_cast<std::size_t>(S::N2)] == doctest::Approx(1.5));
  CHECK(mins[static_cast<std::size_t>(S::IND)] == doctest::Approx(0.5));
  CHECK(m.duration_min() == doctest::Approx(4.0));

  const std::vector<std::optional<double>> wk{10.0, std::nullopt, 20.0, 30.0};
  CHECK(*weekly_mean(wk) == doctest::Approx(20.0));
  const std::vector<std::optional<double>> none{std::nullopt};
  CHECK_FALSE(weekly_mean(none).has_value());
  CHECK(sleep_stage_from_string("R") == S::REM);
  CHECK(sleep_stage_from_string("N2") == S::N2);
  CHECK(to_string(S::REM) == "REM");
  CHECK_THROWS(sleep_stage_from_string("N4"));
}

}  // TEST_SUITE
