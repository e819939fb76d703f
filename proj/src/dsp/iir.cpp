#include "alphaloop/dsp/iir.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "alphaloop/dsp/angles.hpp"

namespace alphaloop::dsp {

using cd = std::complex<double>;

void BandpassSpec::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw std::invalid_argument("bandpass: sample_rate must be positive");
  }
  if (!std::isfinite(center_hz) || !std::isfinite(half_bandwidth_hz) || !(half_bandwidth_hz > 0.0)) {
    throw std::invalid_argument("bandpass: center and half-bandwidth must be finite, half-bandwidth > 0");
  }
  if (!(low_hz() > 0.0) || !(high_hz() < sample_rate / 2.0)) {
    throw std::invalid_argument("bandpass: band [" + std::to_string(low_hz()) + ", " + std::to_string(high_hz()) +
                                "] Hz must lie inside (0, " + std::to_string(sample_rate / 2.0) + ") Hz");
  }
  if (order < 1 || order > 4) {
    throw std::invalid_argument("bandpass: order must be in {1, 2, 3, 4}");
  }
}

BandpassSpec BandpassSpec::from_edges(double low_hz, double high_hz, int order, double sample_rate) {
  return BandpassSpec{(low_hz + high_hz) / 2.0, (high_hz - low_hz) / 2.0, order, sample_rate, BandCentering::Edges};
}

cd Biquad::response(double omega) const {
  const cd z1 = std::polar(1.0, -omega);
  const cd z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

FilterCoefficients::FilterCoefficients(std::vector<Biquad> sections, double sample_rate)
    : sections_(std::move(sections)), sample_rate_(sample_rate) {}

namespace {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

std::vector<double> FilterCoefficients::feedforward() const {
  std::vector<double> p{1.0};
  for (const auto& s : sections_) p = poly_mul(p, {s.b0, s.b1, s.b2});
  return p;
}

std::vector<double> FilterCoefficients::feedback() const {
  std::vector<double> p{1.0};
  for (const auto& s : sections_) p = poly_mul(p, {1.0, s.a1, s.a2});
  return p;
}

std::vector<cd> FilterCoefficients::poles() const {
  std::vector<cd> out;
  for (const auto& s : sections_) {
    // z^2 + a1 z + a2 = 0
    const cd disc = std::sqrt(cd(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    out.push_back((-s.a1 + disc) / 2.0);
    out.push_back((-s.a1 - disc) / 2.0);
  }
  return out;
}

cd FilterCoefficients::response_at(double freq_hz) const {
  const double omega = 2.0 * kPi * freq_hz / sample_rate_;
  cd h{1.0, 0.0};
  for (const auto& s : sections_) h *= s.response(omega);
  return h;
}

double FilterCoefficients::phase_deg_at(double freq_hz) const {
  return wrap180(rad2deg(std::arg(response_at(freq_hz))));
}

FilterCoefficients design_bandpass(const BandpassSpec& spec) {
  spec.validate();
  const double fs = spec.sample_rate;
  auto warp = [fs](double f) { return std::tan(kPi * f / fs); };
  const double w0 = spec.centering == BandCentering::Center ? warp(spec.center_hz)
                                                            : std::sqrt(warp(spec.low_hz()) * warp(spec.high_hz()));
  const double bw = warp(spec.high_hz()) - warp(spec.low_hz());
  const int n = spec.order;

  std::vector<cd> zpoles;
  for (int k = 0; k < n; ++k) {
    const cd p = std::polar(1.0, kPi * (2.0 * k + n + 1.0) / (2.0 * n));
    const cd root = std::sqrt(p * p * bw * bw - 4.0 * w0 * w0);
    for (const cd s : {(p * bw + root) / 2.0, (p * bw - root) / 2.0}) {
      zpoles.push_back((1.0 + s) / (1.0 - s));
    }
  }

  // Pair conjugates; leftover real poles are paired with each other.
  std::vector<Biquad> sections;
  std::vector<double> reals;
  const double tol = 1e-12;
  for (const cd& z : zpoles) {
    if (z.imag() > tol) {
      Biquad b;
      b.a1 = -2.0 * z.real();
      b.a2 = std::norm(z);
      sections.push_back(b);
    } else if (std::abs(z.imag()) <= tol) {
      reals.push_back(z.real());
    }
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    Biquad b;
    b.a1 = -(reals[i] + reals[i + 1]);
    b.a2 = reals[i] * reals[i + 1];
    sections.push_back(b);
  }
  if (sections.size() != static_cast<std::size_t>(n)) {
    throw std::logic_error("design_bandpass: pole pairing failed");
  }

  const double omega_c = 2.0 * std::atan(w0);
  for (auto& b : sections) {
    b.b0 = 1.0;
    b.b1 = 0.0;
    b.b2 = -1.0;
    const double g = 1.0 / std::abs(b.response(omega_c));
    b.b0 = g;
    b.b2 = -g;
  }
  FilterCoefficients coeffs(std::move(sections), fs);
  if (coeffs.response_at(std::atan(w0) * fs / kPi).real() < 0.0) {
    // Flip one section so the passband response is +1 rather than -1.
    std::vector<Biquad> s = coeffs.sections();
    s.front().b0 = -s.front().b0;
    s.front().b2 = -s.front().b2;
    coeffs = FilterCoefficients(std::move(s), fs);
  }
  return coeffs;
}

SosFilter::SosFilter(FilterCoefficients coeffs)
    : coeffs_(std::move(coeffs)), sections_(coeffs_.sections()), state_(2 * sections_.size(), 0.0) {}

void SosFilter::reset() { std::fill(state_.begin(), state_.end(), 0.0); }

namespace {

void require_finite(std::span<const double> series, const char* who) {
  for (double v : series) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": series contains non-finite values");
  }
}

}  // namespace

std::vector<double> filter_stream(const FilterCoefficients& coeffs, std::span<const double> series) {
  require_finite(series, "filter_stream");
  SosFilter f(coeffs);
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = f.process(series[i]);
  return out;
}

std::vector<double> filtfilt(const FilterCoefficients& coeffs, std::span<const double> series) {
  require_finite(series, "filtfilt");
  const std::size_t n = series.size();
  if (n < 2) return {series.begin(), series.end()};
  const std::size_t pad = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(coeffs.sample_rate())));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * series[0] - series[i]);
  ext.insert(ext.end(), series.begin(), series.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * series[n - 1] - series[n - 1 - i]);

  SosFilter f(coeffs);
  for (double& v : ext) v = f.process(v);
  f.reset();
  for (auto it = ext.rbegin(); it != ext.rend(); ++it) *it = f.process(*it);
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace alphaloop::dsp
