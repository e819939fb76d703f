#include "alphaloop/dsp/hilbert.hpp"

#include <cmath>
#include <stdexcept>

#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/dsp/fft.hpp"

namespace alphaloop::dsp {

AnalyticSeries hilbert_offline(std::span<const double> series, double sample_rate) {
  const std::size_t n = series.size();
  if (n < 64) throw std::invalid_argument("hilbert_offline: series must have at least 64 samples");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("hilbert_offline: sample_rate must be positive");
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(series[i])) throw std::invalid_argument("hilbert_offline: non-finite sample");
    buf[i] = series[i];
  }
  std::vector<cplx> spec = fft(buf);
  for (std::size_t k = 1; k < n; ++k) {
    if (n % 2 == 0 && k == n / 2) continue;
    spec[k] *= (k < (n + 1) / 2) ? 2.0 : 0.0;
  }
  const std::vector<cplx> z = ifft(spec);
  AnalyticSeries out;
  out.phase_deg.resize(n);
  out.amplitude_uv.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.phase_deg[i] = wrap360(rad2deg(std::arg(z[i])));
    out.amplitude_uv[i] = std::abs(z[i]);
  }
  return out;
}

}  // namespace alphaloop::dsp
