#include "alphaloop/dsp/echt.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "alphaloop/dsp/angles.hpp"

namespace alphaloop::dsp {

RealWindow::RealWindow(std::span<const double> samples, double sample_rate)
    : samples_(samples), sample_rate_(sample_rate) {
  if (samples.size() < 8) throw std::invalid_argument("ecHT window needs at least 8 samples");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw std::invalid_argument("ecHT window sample rate must be positive");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("ecHT window contains non-finite samples");
  }
}

void EchtConfig::validate() const {
  if (window_samples < 8) throw std::invalid_argument("ecHT window_samples must be >= 8");
  band.validate();
}

EchtEstimator::EchtEstimator(EchtConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  filter_ = design_bandpass(cfg_.band);

  const std::size_t n = cfg_.window_samples;
  const double fs = cfg_.band.sample_rate;
  weights_.assign(n, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    double mask = 0.0;
    if (k == 0 || (n % 2 == 0 && k == n / 2)) {
      mask = 1.0;
    } else if (k < (n + 1) / 2) {
      mask = 2.0;
    }
    if (mask == 0.0) continue;
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    weights_[k] = mask * filter_.response_at(f);
  }

  // kernel[m] = (1/N) sum_k W[k] exp(+2πi k (target - m) / N): the inverse
  // transform of W read at a circular shift.
  const std::vector<cplx> w_time = ifft(weights_);
  kernel_last_.resize(n);
  kernel_prev_.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    kernel_last_[m] = w_time[(n - 1 - m + n) % n];
    kernel_prev_[m] = w_time[(2 * n - 2 - m) % n];
  }
}

void EchtEstimator::check(const RealWindow& window) const {
  if (window.size() != cfg_.window_samples) {
    throw std::invalid_argument("ecHT window length " + std::to_string(window.size()) +
                                " does not match configured " + std::to_string(cfg_.window_samples));
  }
  if (window.sample_rate() != cfg_.band.sample_rate) {
    throw std::invalid_argument("ecHT window sample rate does not match the filter's sample rate");
  }
}

PhaseEstimate EchtEstimator::from_pair(cplx last, cplx prev) const {
  PhaseEstimate p;
  p.phase_deg = wrap360(rad2deg(std::arg(last)));
  p.amplitude_uv = std::abs(last);
  const double dphi = wrap180(rad2deg(std::arg(last) - std::arg(prev)));
  p.inst_freq_hz = dphi / 360.0 * cfg_.band.sample_rate;
  return p;
}

PhaseEstimate EchtEstimator::estimate_fft(const RealWindow& window) const {
  check(window);
  const std::size_t n = window.size();
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = window.samples()[i];
  std::vector<cplx> spec = fft(buf);
  for (std::size_t k = 0; k < n; ++k) spec[k] *= weights_[k];
  const std::vector<cplx> analytic = ifft(spec);
  return from_pair(analytic[n - 1], analytic[n - 2]);
}

cplx EchtEstimator::endpoint(const double* window_begin) const {
  double re = 0.0, im = 0.0;
  const std::size_t n = kernel_last_.size();
  for (std::size_t m = 0; m < n; ++m) {
    re += kernel_last_[m].real() * window_begin[m];
    im += kernel_last_[m].imag() * window_begin[m];
  }
  return {re, im};
}

PhaseEstimate EchtEstimator::estimate(const RealWindow& window) const {
  check(window);
  const double* x = window.samples().data();
  cplx prev{0.0, 0.0};
  for (std::size_t m = 0; m < kernel_prev_.size(); ++m) prev += kernel_prev_[m] * x[m];
  return from_pair(endpoint(x), prev);
}

PhaseEstimate echt(const RealWindow& window, const BandpassSpec& spec) {
  if (window.sample_rate() != spec.sample_rate) {
    throw std::invalid_argument("ecHT: window and filter sample rates differ");
  }
  EchtEstimator est(EchtConfig{window.size(), spec});
  return est.estimate_fft(window);
}

namespace {

void check_endpoints(const EchtEstimator& est, std::span<const double> series,
                     std::span<const std::size_t> endpoints) {
  const std::size_t n = est.window_size();
  for (std::size_t e : endpoints) {
    if (e + 1 < n || e >= series.size()) {
      throw std::out_of_range("ecHT endpoint " + std::to_string(e) + " lacks a full window");
    }
  }
  RealWindow(series, est.config().band.sample_rate);  // finiteness check
}

}  // namespace

std::vector<PhaseEstimate> echt_endpoints_serial(const EchtEstimator& est, std::span<const double> series,
                                                 std::span<const std::size_t> endpoints) {
  check_endpoints(est, series, endpoints);
  const std::size_t n = est.window_size();
  const double fs = est.config().band.sample_rate;
  std::vector<PhaseEstimate> out(endpoints.size());
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    out[i] = est.estimate(RealWindow(series.subspan(endpoints[i] + 1 - n, n), fs));
  }
  return out;
}

std::vector<PhaseEstimate> echt_endpoints(const EchtEstimator& est, std::span<const double> series,
                                          std::span<const std::size_t> endpoints) {
  check_endpoints(est, series, endpoints);
  const std::size_t n = est.window_size();
  const double fs = est.config().band.sample_rate;
  std::vector<PhaseEstimate> out(endpoints.size());
  const auto count = static_cast<std::ptrdiff_t>(endpoints.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out[idx] = est.estimate(RealWindow(series.subspan(endpoints[idx] + 1 - n, n), fs));
  }
  return out;
}

}  // namespace alphaloop::dsp
