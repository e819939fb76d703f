#include "alphaloop/sim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/dsp/fft.hpp"
#include "alphaloop/sim/rng.hpp"

namespace alphaloop::sim {

using dsp::kPi;

std::vector<double> gen_pink_noise(std::size_t n, double sample_rate, double level_uv, std::uint64_t seed) {
  if (n < 256) throw std::invalid_argument("gen_pink_noise: need at least 256 samples");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("gen_pink_noise: sample_rate must be positive");
  if (!(level_uv >= 0.0)) throw std::invalid_argument("gen_pink_noise: level must be >= 0");
  if (level_uv == 0.0) return std::vector<double>(n, 0.0);

  Rng rng(seed);
  std::vector<double> white(n);
  for (double& v : white) v = rng.normal();
  std::vector<dsp::cplx> spec = dsp::rfft(white);
  spec[0] = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    spec[k] /= std::sqrt(f);
  }
  std::vector<double> out = dsp::irfft(spec, n);
  double ss = 0.0;
  for (double v : out) ss += v * v;
  const double scale = level_uv / std::sqrt(ss / static_cast<double>(n));
  for (double& v : out) v *= scale;
  return out;
}

double band_power(std::span<const double> series, double sample_rate, double low_hz, double high_hz) {
  const std::size_t n = series.size();
  if (n == 0) return 0.0;
  const std::vector<dsp::cplx> spec = dsp::rfft(series);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  double p = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    if (f < low_hz || f > high_hz) continue;
    const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
    p += (edge ? 1.0 : 2.0) * std::norm(spec[k]) / n2;
  }
  return p;
}

double band_power_fraction(std::span<const double> series, double sample_rate, double low_hz, double high_hz) {
  const double total = band_power(series, sample_rate, 0.0, sample_rate);
  if (total == 0.0) return 0.0;
  return band_power(series, sample_rate, low_hz, high_hz) / total;
}

void OscillatorSpec::validate() const {
  if (!(base_freq_hz >= 7.5 && base_freq_hz <= 14.0)) {
    throw std::invalid_argument("oscillator base_freq_hz must lie in [7.5, 14] Hz");
  }
  if (!(amplitude_uv >= 0.0) || !std::isfinite(amplitude_uv)) throw std::invalid_argument("oscillator amplitude must be >= 0");
  if (!(am_depth >= 0.0 && am_depth < 1.0)) throw std::invalid_argument("oscillator am_depth must be in [0, 1)");
  if (!(am_rate_hz >= 0.0)) throw std::invalid_argument("oscillator am_rate_hz must be >= 0");
  if (!(freq_jitter_hz >= 0.0 && freq_jitter_hz < base_freq_hz)) {
    throw std::invalid_argument("oscillator freq_jitter_hz must be in [0, base_freq_hz)");
  }
  if (initial_phase_deg && !std::isfinite(*initial_phase_deg)) throw std::invalid_argument("initial phase not finite");
}

void ErpTemplate::validate() const {
  if (!(p1_latency_s >= 0.035 && p1_latency_s <= 0.075)) {
    throw std::invalid_argument("ERP p1_latency_s must lie in [0.035, 0.075] s");
  }
  if (!(p1_width_s > 0.0) || !(n1_width_s > 0.0)) throw std::invalid_argument("ERP component widths must be > 0");
  if (!(n1_delay_s >= 0.0)) throw std::invalid_argument("ERP n1_delay_s must be >= 0");
  if (!(post_stim_alpha_gain_peak > 0.0) || !(post_stim_alpha_gain_trough > 0.0)) {
    throw std::invalid_argument("ERP post-stimulus alpha gains must be > 0");
  }
  if (!(gain_horizon_s >= 0.0)) throw std::invalid_argument("ERP gain horizon must be >= 0");
}

double ErpTemplate::value(double t_s) const {
  auto bump = [](double t, double mu, double sigma) {
    const double z = (t - mu) / sigma;
    return std::exp(-0.5 * z * z);
  };
  return p1_amplitude_uv * bump(t_s, p1_latency_s, p1_width_s) -
         n1_amplitude_uv * bump(t_s, p1_latency_s + n1_delay_s, n1_width_s);
}

double truth_phase_at(const GroundTruthPhase& truth, double sample_rate, double t_s) {
  const std::size_t n = truth.size();
  if (n == 0) throw std::invalid_argument("truth_phase_at: empty ground truth");
  const double x = std::max(0.0, t_s * sample_rate);
  const auto i = static_cast<std::size_t>(std::floor(x));
  if (i + 1 >= n) {
    if (n < 2) return truth.phase_deg.back();
    const double step = dsp::wrap360(truth.phase_deg[n - 1] - truth.phase_deg[n - 2]);
    return dsp::wrap360(truth.phase_deg[n - 1] + step * (x - static_cast<double>(n - 1)));
  }
  const double frac = x - static_cast<double>(i);
  const double step = dsp::wrap360(truth.phase_deg[i + 1] - truth.phase_deg[i]);
  return dsp::wrap360(truth.phase_deg[i] + frac * step);
}

double SimTrace::truth_phase_at(double t_s) const {
  return sim::truth_phase_at(truth, recording.sample_rate_hz, t_s);
}

SimTrace gen_alpha_trace(const OscillatorSpec& spec, double duration_s, double sample_rate,
                         std::vector<double> channel_gains) {
  spec.validate();
  if (!(duration_s >= 2.0)) throw std::invalid_argument("gen_alpha_trace: duration must be >= 2 s");
  if (!(sample_rate > 2.0 * (spec.base_freq_hz + spec.freq_jitter_hz))) {
    throw std::invalid_argument("gen_alpha_trace: sample rate below twice the oscillator frequency");
  }
  if (channel_gains.empty() || channel_gains.size() > 3) throw std::invalid_argument("gen_alpha_trace: 1 to 3 channels");

  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  SimTrace tr;
  tr.recording.sample_rate_hz = sample_rate;
  switch (channel_gains.size()) {
    case 1: tr.recording.labels = {"Fpz"}; break;
    case 2: tr.recording.labels = {"Fp1", "Fpz"}; break;
    default: tr.recording.labels = default_channel_labels(); break;
  }
  tr.osc_channel_gain = channel_gains;
  tr.oscillator.resize(n);
  tr.truth.phase_deg.resize(n);
  tr.truth.amp_uv.resize(n);

  double cycles = spec.initial_phase_deg ? dsp::wrap360(*spec.initial_phase_deg) / 360.0 : Rng(spec.seed).uniform();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double amp = spec.amplitude_uv * (1.0 + spec.am_depth * std::sin(2.0 * kPi * spec.am_rate_hz * t));
    tr.truth.phase_deg[i] = 360.0 * cycles;
    tr.truth.amp_uv[i] = amp;
    tr.oscillator[i] = amp * std::cos(2.0 * kPi * cycles);
    const double f = spec.base_freq_hz + spec.freq_jitter_hz * std::sin(2.0 * kPi * kFrequencyDriftRateHz * t);
    cycles += f / sample_rate;
    cycles -= std::floor(cycles);
  }
  tr.recording.channels.resize(channel_gains.size());
  for (std::size_t c = 0; c < channel_gains.size(); ++c) {
    auto& ch = tr.recording.channels[c];
    ch.resize(n);
    for (std::size_t i = 0; i < n; ++i) ch[i] = channel_gains[c] * tr.oscillator[i];
  }
  tr.recording.provenance = {{"generator", "gen_alpha_trace"},
                             {"oscillator_seed", std::to_string(spec.seed)}};
  return tr;
}

namespace {

void check_time(const SimTrace& tr, double t, const char* who) {
  if (!std::isfinite(t) || t < 0.0 || t > tr.duration_s()) {
    throw std::out_of_range(std::string(who) + ": time " + std::to_string(t) + " s outside the trace");
  }
}

void check_channel(const SimTrace& tr, std::size_t channel, const char* who) {
  if (channel >= tr.recording.num_channels()) throw std::out_of_range(std::string(who) + ": no such channel");
}

}  // namespace

SimTrace inject_blinks(SimTrace trace, std::span<const double> times_s, double peak_uv, std::size_t channel) {
  for (double t : times_s) check_time(trace, t, "inject_blinks");
  if (times_s.empty()) return trace;
  check_channel(trace, channel, "inject_blinks");
  const double fs = trace.recording.sample_rate_hz;
  auto& ch = trace.recording.channels[channel];
  const double half = kBlinkDurationS / 2.0;
  for (double t : times_s) {
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil((t - half) * fs));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor((t + half) * fs));
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(lo, 0); i <= hi && i < static_cast<std::ptrdiff_t>(ch.size()); ++i) {
      const double dt = static_cast<double>(i) / fs - t;
      ch[static_cast<std::size_t>(i)] += peak_uv * std::cos(kPi * dt / kBlinkDurationS);
    }
    trace.annotations.push_back({Annotation::Kind::Blink, t, peak_uv});
  }
  return trace;
}

SimTrace inject_erp(SimTrace trace, std::span<const double> stim_times_s, const ErpTemplate& tmpl,
                    std::size_t channel) {
  tmpl.validate();
  for (double t : stim_times_s) check_time(trace, t, "inject_erp");
  if (stim_times_s.empty()) return trace;
  check_channel(trace, channel, "inject_erp");
  const double fs = trace.recording.sample_rate_hz;
  const auto n = static_cast<std::ptrdiff_t>(trace.recording.num_samples());
  const double support = tmpl.p1_latency_s + tmpl.n1_delay_s + 8.0 * std::max(tmpl.p1_width_s, tmpl.n1_width_s);

  for (double t : stim_times_s) {
    double gain = 1.0;
    const double arrival = t + tmpl.p1_latency_s;
    if (tmpl.phase_dependent && arrival < trace.duration_s()) {
      const double phi = dsp::deg2rad(trace.truth_phase_at(arrival));
      const double w_peak = 0.5 * (1.0 + std::cos(phi));
      gain = tmpl.post_stim_alpha_gain_peak * w_peak + tmpl.post_stim_alpha_gain_trough * (1.0 - w_peak);
      const auto lo = static_cast<std::ptrdiff_t>(std::ceil(arrival * fs));
      const auto hi = std::min(n, static_cast<std::ptrdiff_t>(std::ceil((arrival + tmpl.gain_horizon_s) * fs)));
      for (std::ptrdiff_t i = lo; i < hi; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double delta = (gain - 1.0) * trace.oscillator[u];
        for (std::size_t c = 0; c < trace.recording.num_channels(); ++c) {
          trace.recording.channels[c][u] += delta * trace.osc_channel_gain[c];
        }
        trace.oscillator[u] *= gain;
        trace.truth.amp_uv[u] *= gain;
      }
    }
    auto& ch = trace.recording.channels[channel];
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil(t * fs));
    const auto hi = std::min(n - 1, static_cast<std::ptrdiff_t>(std::floor((t + support) * fs)));
    for (std::ptrdiff_t i = lo; i <= hi; ++i) {
      ch[static_cast<std::size_t>(i)] += tmpl.value(static_cast<double>(i) / fs - t);
    }
    trace.annotations.push_back({Annotation::Kind::Erp, t, gain});
  }
  return trace;
}

double noise_level_for(const SynthConfig& cfg, std::span<const double> unit_noise) {
  if (!cfg.noise.alpha_snr_db) {
    if (!(cfg.noise.level_uv >= 0.0)) throw std::invalid_argument("noise level must be >= 0");
    return cfg.noise.level_uv;
  }
  const auto& o = cfg.oscillator;
  const double p_osc = 0.5 * o.amplitude_uv * o.amplitude_uv * (1.0 + 0.5 * o.am_depth * o.am_depth);
  const double hw = cfg.noise.snr_band_half_width_hz;
  const double frac = band_power_fraction(unit_noise, cfg.sample_rate, o.base_freq_hz - hw, o.base_freq_hz + hw);
  if (!(frac > 0.0)) throw std::invalid_argument("noise has no power in the SNR band");
  const double snr = std::pow(10.0, *cfg.noise.alpha_snr_db / 10.0);
  return std::sqrt(p_osc / (snr * frac));
}

SimTrace synth_recording(const SynthConfig& cfg) {
  const double att = cfg.side_channel_attenuation;
  if (!(att >= 0.0)) throw std::invalid_argument("side_channel_attenuation must be >= 0");
  SimTrace tr = gen_alpha_trace(cfg.oscillator, cfg.duration_s, cfg.sample_rate, {att, 1.0, att});
  const std::size_t n = tr.recording.num_samples();

  const bool any_noise = cfg.noise.alpha_snr_db.has_value() || cfg.noise.level_uv != 0.0;
  if (any_noise) {
    std::vector<std::vector<double>> unit(3);
    for (std::size_t c = 0; c < 3; ++c) unit[c] = gen_pink_noise(n, cfg.sample_rate, 1.0, derive_seed(cfg.noise_seed, c));
    const double level = noise_level_for(cfg, unit[1]);
    for (std::size_t c = 0; c < 3; ++c) {
      auto& ch = tr.recording.channels[c];
      for (std::size_t i = 0; i < n; ++i) ch[i] += level * unit[c][i];
    }
    tr.recording.provenance.emplace_back("noise_seed", std::to_string(cfg.noise_seed));
    tr.recording.provenance.emplace_back("noise_level_uv", std::to_string(level));
  }
  tr = inject_blinks(std::move(tr), cfg.blink_times_s, cfg.blink_peak_uv, 1);
  tr = inject_erp(std::move(tr), cfg.erp_stim_times_s, cfg.erp, 1);
  tr.recording.provenance.front().second = "synth_recording";
  return tr;
}

}  // namespace alphaloop::sim
