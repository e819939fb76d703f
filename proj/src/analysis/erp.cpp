#include "alphaloop/analysis/erp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "alphaloop/dsp/iir.hpp"
#include "alphaloop/errors.hpp"

namespace alphaloop::analysis {

void ErpConfig::validate() const {
  if (!(epoch_start_s < 0.0) || !(epoch_end_s > 0.0)) throw std::invalid_argument("erp: epoch must straddle the stimulus");
  if (!(p1_start_s >= epoch_start_s) || !(p1_end_s <= epoch_end_s) || !(p1_end_s > p1_start_s)) {
    throw std::invalid_argument("erp: P1 window must lie inside the epoch window");
  }
  if (!(reject_threshold_uv > 0.0)) throw std::invalid_argument("erp: reject threshold must be positive");
  if (!(band_low_hz > 0.0) || !(band_high_hz > band_low_hz)) throw std::invalid_argument("erp: bad band");
}

ErpAverage epoch_erp(std::span<const double> series, double sample_rate, std::span<const double> stim_times_s,
                     const ErpConfig& cfg) {
  cfg.validate();
  if (!(sample_rate > 0.0)) throw std::invalid_argument("erp: sample_rate must be positive");
  if (stim_times_s.empty()) throw std::invalid_argument("erp: no stimulus times");

  const auto filtered = dsp::filtfilt(
      dsp::design_bandpass(dsp::BandpassSpec::from_edges(cfg.band_low_hz, cfg.band_high_hz, cfg.filter_order, sample_rate)),
      series);

  const auto pre = static_cast<long long>(std::llround(cfg.epoch_start_s * sample_rate));
  const auto post = static_cast<long long>(std::llround(cfg.epoch_end_s * sample_rate));
  const auto len = static_cast<std::size_t>(post - pre + 1);
  const auto n = static_cast<long long>(series.size());

  ErpAverage out;
  out.sample_rate_hz = sample_rate;
  out.times_s.resize(len);
  for (std::size_t i = 0; i < len; ++i) out.times_s[i] = static_cast<double>(pre + static_cast<long long>(i)) / sample_rate;
  out.waveform.assign(len, 0.0);

  for (double t : stim_times_s) {
    if (!std::isfinite(t)) throw std::invalid_argument("erp: non-finite stimulus time");
    const long long s = std::llround(t * sample_rate);
    if (s + pre < 0 || s + post >= n) {
      ++out.excluded;
      continue;
    }
    const double* e = filtered.data() + (s + pre);
    bool reject = false;
    for (std::size_t i = 0; i < len && !reject; ++i) reject = std::abs(e[i]) > cfg.reject_threshold_uv;
    if (reject) {
      ++out.rejected;
      continue;
    }
    for (std::size_t i = 0; i < len; ++i) out.waveform[i] += e[i];
    ++out.kept;
  }
  if (out.kept == 0) {
    throw std::invalid_argument("erp: no epochs kept (" + std::to_string(out.rejected) + " rejected, " +
                                std::to_string(out.excluded) + " outside the record)");
  }
  for (double& v : out.waveform) v /= static_cast<double>(out.kept);
  return out;
}

double detect_p1(const ErpAverage& avg, const ErpConfig& cfg) {
  cfg.validate();
  const auto& t = avg.times_s;
  const auto& w = avg.waveform;
  if (t.size() != w.size() || t.size() < 3) throw std::invalid_argument("detect_p1: malformed average");
  const double eps = 1e-9;
  if (t.front() > cfg.p1_start_s + eps || t.back() < cfg.p1_end_s - eps) {
    throw std::invalid_argument("detect_p1: average does not cover the P1 window");
  }

  std::size_t best = w.size();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (t[i] < cfg.p1_start_s - eps || t[i] > cfg.p1_end_s + eps) continue;
    if (best == w.size() || w[i] > w[best]) best = i;
  }
  if (best == w.size() || !(w[best] > 0.0)) throw NoPositivePeakError("detect_p1: no positive value in the P1 window");
  const bool left_ok = best == 0 || w[best - 1] <= w[best];
  const bool right_ok = best + 1 == w.size() || w[best + 1] <= w[best];
  if (!left_ok || !right_ok) {
    throw NoPositivePeakError("detect_p1: P1 window maximum sits on a slope, not a peak");
  }
  return t[best];
}

}  // namespace alphaloop::analysis
