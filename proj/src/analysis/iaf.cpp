#include "alphaloop/analysis/iaf.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "alphaloop/errors.hpp"

namespace alphaloop::analysis {

void IafConfig::validate() const {
  spectrogram.validate();
  if (!(fit_low_hz > 0.0) || !(fit_high_hz > fit_low_hz)) throw std::invalid_argument("iaf: bad fit band");
  if (!(search_low_hz >= fit_low_hz) || !(search_high_hz <= fit_high_hz) || !(search_high_hz > search_low_hz)) {
    throw std::invalid_argument("iaf: search band must lie inside the fit band");
  }
  if (!(floor_factor >= 0.0)) throw std::invalid_argument("iaf: floor_factor must be >= 0");
}

std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, std::size_t degree) {
  const std::size_t m = x.size();
  const std::size_t n = degree + 1;
  if (y.size() != m) throw std::invalid_argument("polyfit: x and y differ in length");
  if (m < n) throw std::invalid_argument("polyfit: fewer points than coefficients");
  std::vector<double> a(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      a[j * m + i] = p;
      p *= x[i];
    }
  }
  std::vector<double> b(y.begin(), y.end());
  const lapack_int info = LAPACKE_dgels(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(m), static_cast<lapack_int>(n),
                                        1, a.data(), static_cast<lapack_int>(m), b.data(), static_cast<lapack_int>(m));
  if (info != 0) throw std::runtime_error("polyfit: least squares failed (info " + std::to_string(info) + ")");
  b.resize(n);
  return b;
}

IafResult estimate_iaf(std::span<const double> series, double sample_rate, const IafConfig& cfg) {
  cfg.validate();
  if (!(sample_rate > 0.0)) throw std::invalid_argument("iaf: sample_rate must be positive");
  const double duration = static_cast<double>(series.size()) / sample_rate;
  if (duration < cfg.min_duration_s) {
    throw std::invalid_argument("iaf: need at least " + std::to_string(cfg.min_duration_s) + " s of data, got " +
                                std::to_string(duration) + " s");
  }
  if (cfg.search_high_hz >= sample_rate / 2.0) throw std::invalid_argument("iaf: search band above Nyquist");

  const Spectrogram sg = multitaper_spectrogram(series, sample_rate, cfg.spectrogram);
  IafResult r;
  r.freqs_hz = sg.freqs_hz;
  r.median_power = median_spectrum(sg);

  std::vector<std::size_t> fit_bins;
  std::vector<double> lx, ly;
  for (std::size_t b = 0; b < r.freqs_hz.size(); ++b) {
    const double f = r.freqs_hz[b];
    if (f < cfg.fit_low_hz || f > cfg.fit_high_hz) continue;
    if (!(r.median_power[b] > 0.0)) throw NoPeakError("iaf: spectrum has no power in the fit band");
    fit_bins.push_back(b);
    lx.push_back(std::log10(f));
    ly.push_back(std::log10(r.median_power[b]));
  }
  const auto c = polyfit(lx, ly, 3);
  std::copy(c.begin(), c.end(), r.detrend_coefficients.begin());

  r.detrended.assign(r.freqs_hz.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> abs_res;
  for (std::size_t i = 0; i < fit_bins.size(); ++i) {
    const double x = lx[i];
    const double fit = c[0] + x * (c[1] + x * (c[2] + x * c[3]));
    r.detrended[fit_bins[i]] = ly[i] - fit;
    abs_res.push_back(std::abs(ly[i] - fit));
  }
  std::nth_element(abs_res.begin(), abs_res.begin() + static_cast<std::ptrdiff_t>(abs_res.size() / 2), abs_res.end());
  r.noise_floor = cfg.floor_factor * abs_res[abs_res.size() / 2];

  // Topographic prominence: descend each side until terrain rises above the
  // peak or the fit band ends, and measure from the higher of the two minima.
  const std::size_t first = fit_bins.front();
  const std::size_t last = fit_bins.back();
  const auto& d = r.detrended;
  double best_prom = -std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t b = first + 1; b < last; ++b) {
    const double f = r.freqs_hz[b];
    if (f < cfg.search_low_hz || f > cfg.search_high_hz) continue;
    if (!(d[b] > d[b - 1] && d[b] >= d[b + 1])) continue;
    double left = d[b];
    for (std::size_t i = b; i-- > first;) {
      if (d[i] > d[b]) break;
      left = std::min(left, d[i]);
    }
    double right = d[b];
    for (std::size_t i = b + 1; i <= last; ++i) {
      if (d[i] > d[b]) break;
      right = std::min(right, d[i]);
    }
    const double prom = d[b] - std::max(left, right);
    if (prom > best_prom) {
      best_prom = prom;
      best = b;
    }
  }
  if (best == 0 || !(best_prom > r.noise_floor)) {
    throw NoPeakError("iaf: no spectral peak in [" + std::to_string(cfg.search_low_hz) + ", " +
                      std::to_string(cfg.search_high_hz) + "] Hz above the noise floor");
  }

  const double ym = d[best - 1], y0 = d[best], yp = d[best + 1];
  const double denom = ym - 2.0 * y0 + yp;
  const double delta = denom < 0.0 ? std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5) : 0.0;
  const double df = r.freqs_hz[1] - r.freqs_hz[0];
  r.iaf_hz = std::clamp(r.freqs_hz[best] + delta * df, cfg.search_low_hz, cfg.search_high_hz);
  r.peak_prominence = best_prom;
  return r;
}

}  // namespace alphaloop::analysis
