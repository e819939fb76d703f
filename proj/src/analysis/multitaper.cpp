#include "alphaloop/analysis/multitaper.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/dsp/fft.hpp"

namespace alphaloop::analysis {

void SpectrogramConfig::validate() const {
  if (n_tapers < 1) throw std::invalid_argument("spectrogram: n_tapers must be >= 1");
  if (!(step_s > 0.0) || !(window_s > step_s)) throw std::invalid_argument("spectrogram: need window > step > 0");
  if (!(time_bandwidth > 0.0)) throw std::invalid_argument("spectrogram: time_bandwidth must be > 0");
  if (static_cast<double>(n_tapers) > 2.0 * time_bandwidth) {
    throw std::invalid_argument("spectrogram: more tapers than 2·NW");
  }
}

std::vector<std::vector<double>> dpss(std::size_t n, double time_bandwidth, std::size_t k) {
  if (n < 2 || k < 1 || k > n) throw std::invalid_argument("dpss: need n >= 2 and 1 <= k <= n");
  const double w = time_bandwidth / static_cast<double>(n);
  const double c = std::cos(2.0 * dsp::kPi * w);
  std::vector<double> d(n), e(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(n) - 1.0 - 2.0 * static_cast<double>(i)) / 2.0;
    d[i] = x * x * c;
    if (i + 1 < n) e[i] = static_cast<double>(i + 1) * static_cast<double>(n - i - 1) / 2.0;
  }

  const auto ln = static_cast<lapack_int>(n);
  const auto lk = static_cast<lapack_int>(k);
  lapack_int m = 0;
  std::vector<double> evals(n), z(n * k);
  std::vector<lapack_int> isuppz(2 * k);
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', ln, d.data(), e.data(), 0.0, 0.0, ln - lk + 1,
                                         ln, 0.0, &m, evals.data(), z.data(), ln, isuppz.data());
  if (info != 0 || m != lk) throw std::runtime_error("dpss: eigen solver failed (info " + std::to_string(info) + ")");

  // Eigenvalues come back ascending; taper 0 has the largest.
  std::vector<std::vector<double>> tapers(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double* col = z.data() + (k - 1 - j) * n;
    std::vector<double> v(col, col + n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double weight = (j % 2 == 0) ? 1.0 : (static_cast<double>(n) - 1.0) / 2.0 - static_cast<double>(i);
      s += weight * v[i];
    }
    if (s < 0.0)
      for (double& x : v) x = -x;
    tapers[j] = std::move(v);
  }
  return tapers;
}

namespace {

struct Layout {
  std::size_t win = 0, step = 0, nfft = 0, n_windows = 0, n_bins = 0;
};

Layout layout(std::size_t n, double fs, const SpectrogramConfig& cfg) {
  cfg.validate();
  if (!(fs > 0.0)) throw std::invalid_argument("spectrogram: sample_rate must be positive");
  Layout l;
  l.win = static_cast<std::size_t>(std::llround(cfg.window_s * fs));
  l.step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.step_s * fs)));
  if (n < l.win) {
    throw std::invalid_argument("spectrogram: series of " + std::to_string(n) + " samples is shorter than one " +
                                std::to_string(l.win) + "-sample window");
  }
  l.nfft = cfg.nfft == 0 ? dsp::next_pow2(l.win) : cfg.nfft;
  if (l.nfft < l.win) throw std::invalid_argument("spectrogram: nfft shorter than the window");
  l.n_windows = 1 + (n - l.win) / l.step;
  l.n_bins = l.nfft / 2 + 1;
  return l;
}

Spectrogram prepare(const Layout& l, double fs) {
  Spectrogram s;
  s.times_s.resize(l.n_windows);
  for (std::size_t w = 0; w < l.n_windows; ++w) {
    s.times_s[w] = (static_cast<double>(w * l.step) + static_cast<double>(l.win) / 2.0) / fs;
  }
  s.freqs_hz.resize(l.n_bins);
  for (std::size_t b = 0; b < l.n_bins; ++b) s.freqs_hz[b] = static_cast<double>(b) * fs / static_cast<double>(l.nfft);
  s.power.assign(l.n_windows * l.n_bins, 0.0);
  return s;
}

void window_psd(const double* x, const Layout& l, double fs, const std::vector<std::vector<double>>& tapers,
                const dsp::FftPlan& plan, std::vector<double>& buf, std::vector<dsp::cplx>& spec, double* out) {
  const double scale = 1.0 / (fs * static_cast<double>(tapers.size()));
  std::fill(out, out + l.n_bins, 0.0);
  for (const auto& taper : tapers) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t i = 0; i < l.win; ++i) buf[i] = x[i] * taper[i];
    plan.execute_r2c(buf.data(), spec.data());
    for (std::size_t b = 0; b < l.n_bins; ++b) out[b] += std::norm(spec[b]);
  }
  for (std::size_t b = 0; b < l.n_bins; ++b) {
    const bool edge = b == 0 || (l.nfft % 2 == 0 && b == l.n_bins - 1);
    out[b] *= scale * (edge ? 1.0 : 2.0);
  }
}

}  // namespace

Spectrogram multitaper_spectrogram_serial(std::span<const double> series, double sample_rate,
                                          const SpectrogramConfig& cfg) {
  const Layout l = layout(series.size(), sample_rate, cfg);
  Spectrogram s = prepare(l, sample_rate);
  const auto tapers = dpss(l.win, cfg.time_bandwidth, cfg.n_tapers);
  const auto plan = dsp::FftPlan::get(l.nfft, dsp::FftPlan::Kind::RealForward);
  std::vector<double> buf(l.nfft);
  std::vector<dsp::cplx> spec(l.n_bins);
  for (std::size_t w = 0; w < l.n_windows; ++w) {
    window_psd(series.data() + w * l.step, l, sample_rate, tapers, *plan, buf, spec, s.power.data() + w * l.n_bins);
  }
  return s;
}

Spectrogram multitaper_spectrogram(std::span<const double> series, double sample_rate, const SpectrogramConfig& cfg) {
  const Layout l = layout(series.size(), sample_rate, cfg);
  Spectrogram s = prepare(l, sample_rate);
  const auto tapers = dpss(l.win, cfg.time_bandwidth, cfg.n_tapers);
  const auto plan = dsp::FftPlan::get(l.nfft, dsp::FftPlan::Kind::RealForward);
  const auto nw = static_cast<std::ptrdiff_t>(l.n_windows);
#pragma omp parallel
  {
    std::vector<double> buf(l.nfft);
    std::vector<dsp::cplx> spec(l.n_bins);
#pragma omp for schedule(static)
    for (std::ptrdiff_t w = 0; w < nw; ++w) {
      const auto uw = static_cast<std::size_t>(w);
      window_psd(series.data() + uw * l.step, l, sample_rate, tapers, *plan, buf, spec, s.power.data() + uw * l.n_bins);
    }
  }
  return s;
}

std::vector<double> median_spectrum(const Spectrogram& s) {
  if (s.n_times() == 0) throw std::invalid_argument("median_spectrum: empty spectrogram");
  std::vector<double> out(s.n_freqs());
  std::vector<double> col(s.n_times());
  for (std::size_t f = 0; f < s.n_freqs(); ++f) {
    for (std::size_t t = 0; t < s.n_times(); ++t) col[t] = s.at(t, f);
    const std::size_t mid = col.size() / 2;
    std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(mid), col.end());
    double m = col[mid];
    if (col.size() % 2 == 0) {
      m = 0.5 * (m + *std::max_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    out[f] = m;
  }
  return out;
}

}  // namespace alphaloop::analysis
