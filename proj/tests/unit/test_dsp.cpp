#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/dsp/circular.hpp"
#include "alphaloop/dsp/echt.hpp"
#include "alphaloop/dsp/fft.hpp"
#include "alphaloop/dsp/hilbert.hpp"
#include "alphaloop/dsp/iir.hpp"
#include "doctest.h"

using namespace alphaloop::dsp;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

std::vector<cplx> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t m = 0; m < n; ++m)
      out[k] += x[m] * std::polar(1.0, -kTau * static_cast<double>(k * m % n) / static_cast<double>(n));
  return out;
}

// |H|^2 of a bilinear-transformed analog Butterworth bandpass.
double butterworth_gain(double f, double fs, double w0, double bw, int order) {
  const double w = std::tan(std::numbers::pi * f / fs);
  const double r = (w * w - w0 * w0) / (bw * w);
  return 1.0 / std::sqrt(1.0 + std::pow(r * r, order));
}

// Analytic mask times causal response, inverse transform read at the last sample.
cplx echt_oracle(const std::vector<double>& x, const FilterCoefficients& h, double fs) {
  const std::size_t n = x.size();
  const auto spec = naive_dft(x);
  cplx z{};
  for (std::size_t k = 0; k < n; ++k) {
    double mask = 0.0;
    if (k == 0 || 2 * k == n) mask = 1.0;
    else if (2 * k < n) mask = 2.0;
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    z += mask * h.response_at(f) * spec[k] *
         std::polar(1.0, kTau * static_cast<double>(k * (n - 1) % n) / static_cast<double>(n));
  }
  return z / static_cast<double>(n);
}

std::vector<double> tone(std::size_t n, double f, double fs, double phase0_deg, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::cos(kTau * f * static_cast<double>(i) / fs + deg2rad(phase0_deg));
  return x;
}

}  // namespace

TEST_SUITE("dsp") {

TEST_CASE("wrap360 and wrap180 ranges and identities") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-5000.0, 5000.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(g);
    const double w = wrap360(a);
    const double h = wrap180(a);
    CHECK(w >= 0.0);
    CHECK(w < 360.0);
    CHECK(h >= -180.0);
    CHECK(h < 180.0);
    CHECK(std::remainder(w - a, 360.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::remainder(h - a, 360.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(circ_dist(a, a + 360.0) < 1e-9);
  }
  CHECK(wrap360(-1.0) == doctest::Approx(359.0));
  CHECK(wrap360(720.0) == 0.0);
  CHECK(circ_diff(10.0, 350.0) == doctest::Approx(20.0));
  CHECK(circ_diff(350.0, 10.0) == doctest::Approx(-20.0));
}

TEST_CASE("rfft matches a naive DFT and irfft inverts it") {
  std::mt19937_64 g(2);
  std::normal_distribution<double> nd;
  for (std::size_t n : {7u, 64u, 100u, 125u, 250u, 256u}) {
    std::vector<double> x(n);
    for (double& v : x) v = nd(g);
    const auto ref = naive_dft(x);
    const auto half = rfft(x);
    REQUIRE(half.size() == n / 2 + 1);
    for (std::size_t k = 0; k < half.size(); ++k) CHECK(std::abs(half[k] - ref[k]) < 1e-9);
    const auto back = irfft(half, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));

    std::vector<cplx> c(x.begin(), x.end());
    const auto full = fft(c);
    const auto inv = ifft(full);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(full[k] - ref[k]) < 1e-9);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(inv[i] - c[i]) < 1e-12);
  }
  CHECK(next_pow2(250) == 256);
  CHECK(next_pow2(256) == 256);
}

TEST_CASE("centered bandpass: unity gain and zero phase at center, Butterworth magnitude") {
  for (double fc : {8.0, 10.0, 12.5}) {
    for (int order : {1, 2, 3, 4}) {
      const BandpassSpec spec{fc, 2.0, order, 250.0};
      const auto h = design_bandpass(spec);
      CHECK(h.sections().size() == static_cast<std::size_t>(order));
      CHECK(h.gain_at(fc) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(h.phase_deg_at(fc)) < 1e-9);
      const double w0 = std::tan(std::numbers::pi * fc / 250.0);
      const double bw = std::tan(std::numbers::pi * spec.high_hz() / 250.0) - std::tan(std::numbers::pi * spec.low_hz() / 250.0);
      for (double f = 0.5; f < 124.5; f += 0.75) {
        CHECK(h.gain_at(f) == doctest::Approx(butterworth_gain(f, 250.0, w0, bw, order)).epsilon(1e-9));
      }
      for (const auto& p : h.poles()) CHECK(std::abs(p) < 1.0);
    }
  }
}

TEST_CASE("edge-specified bandpass puts -3 dB at the requested edges") {
  for (auto [lo, hi] : {std::pair{2.5, 35.0}, std::pair{2.0, 30.0}}) {
    const auto h = design_bandpass(BandpassSpec::from_edges(lo, hi, 2, 250.0));
    CHECK(h.gain_at(lo) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(h.gain_at(hi) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    const double w0 = std::sqrt(std::tan(std::numbers::pi * lo / 250.0) * std::tan(std::numbers::pi * hi / 250.0));
    CHECK(h.gain_at(250.0 / std::numbers::pi * std::atan(w0)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("bandpass validation rejects bad specs") {
  CHECK_THROWS_AS(design_bandpass(BandpassSpec{1.0, 2.0, 2, 250.0}), std::invalid_argument);
  CHECK_THROWS_AS(design_bandpass(BandpassSpec{124.0, 2.0, 2, 250.0}), std::invalid_argument);
  CHECK_THROWS_AS(design_bandpass(BandpassSpec{10.0, 2.0, 5, 250.0}), std::invalid_argument);
  CHECK_THROWS_AS(design_bandpass(BandpassSpec{10.0, 0.0, 2, 250.0}), std::invalid_argument);
}

TEST_CASE("streaming SOS filter equals the difference equation of its transfer polynomials") {
  const auto h = design_bandpass(BandpassSpec{10.0, 2.0, 3, 250.0});
  const auto b = h.feedforward();
  const auto a = h.feedback();
  std::mt19937_64 g(3);
  std::normal_distribution<double> nd;
  std::vector<double> x(2000);
  for (double& v : x) v = nd(g);
  const auto y = filter_stream(h, x);
  std::vector<double> ref(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < b.size() && k <= i; ++k) acc += b[k] * x[i - k];
    for (std::size_t k = 1; k < a.size() && k <= i; ++k) acc -= a[k] * ref[i - k];
    ref[i] = acc;
  }
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-9).scale(1.0));

  SosFilter f(h);
  for (std::size_t i = 0; i < 100; ++i) CHECK(f.process(x[i]) == doctest::Approx(y[i]));
  f.reset();
  CHECK(f.process(x[0]) == doctest::Approx(y[0]));
}

TEST_CASE("filtfilt has zero phase at every in-band frequency") {
  const auto h = design_bandpass(BandpassSpec::from_edges(2.0, 30.0, 2, 250.0));
  const auto x = tone(5000, 8.0, 250.0, 0.0);
  const auto y = filtfilt(h, x);
  const double g = h.gain_at(8.0);
  for (std::size_t i = 1500; i < 3500; ++i) CHECK(y[i] == doctest::Approx(g * g * x[i]).epsilon(1e-3).scale(1.0));
}

TEST_CASE("ecHT FFT route, fused kernel and naive oracle agree") {
  std::mt19937_64 g(4);
  std::normal_distribution<double> nd;
  for (std::size_t n : {125u, 250u, 256u}) {
    const EchtEstimator est(EchtConfig{n, BandpassSpec{10.0, 2.0, 2, 250.0}});
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> x(n);
      for (double& v : x) v = nd(g);
      const cplx z = echt_oracle(x, est.filter(), 250.0);
      const cplx k = est.endpoint(x.data());
      CHECK(std::abs(k - z) < 1e-9 * (1.0 + std::abs(z)));
      const RealWindow w(x, 250.0);
      const auto a = est.estimate(w);
      const auto b = est.estimate_fft(w);
      CHECK(circ_dist(a.phase_deg, b.phase_deg) < 1e-7);
      CHECK(a.amplitude_uv == doctest::Approx(b.amplitude_uv).epsilon(1e-9));
      CHECK(a.inst_freq_hz == doctest::Approx(b.inst_freq_hz).epsilon(1e-7));
      CHECK(circ_dist(a.phase_deg, wrap360(rad2deg(std::arg(z)))) < 1e-7);
    }
  }
}

TEST_CASE("ecHT endpoint phase of a centered tone is within 1 degree for any start phase") {
  const EchtEstimator est(EchtConfig{250, BandpassSpec{10.0, 2.0, 2, 250.0}});
  for (double p0 = 0.0; p0 < 360.0; p0 += 7.5) {
    const auto x = tone(250, 10.0, 250.0, p0, 20.0);
    const auto e = est.estimate(RealWindow(x, 250.0));
    const double truth = wrap360(p0 + 360.0 * 10.0 * 249.0 / 250.0);
    CHECK(circ_dist(e.phase_deg, truth) <= 1.0);
    CHECK(e.amplitude_uv == doctest::Approx(20.0).epsilon(0.01));
    CHECK(e.inst_freq_hz == doctest::Approx(10.0).epsilon(0.02));
  }
}

TEST_CASE("ecHT off-center tones carry the causal filter phase") {
  const EchtEstimator est(EchtConfig{250, BandpassSpec{10.0, 2.0, 2, 250.0}});
  for (double f : {9.0, 9.5, 10.5, 11.0}) {
    for (double p0 : {0.0, 90.0, 200.0}) {
      const auto x = tone(250, f, 250.0, p0);
      const auto e = est.estimate(RealWindow(x, 250.0));
      const double truth = wrap360(p0 + 360.0 * f * 249.0 / 250.0 + est.filter().phase_deg_at(f));
      if (std::fmod(f, 1.0) == 0.0) CHECK(circ_dist(e.phase_deg, truth) <= 1.0);
      else CHECK(circ_dist(e.phase_deg, truth) <= 1.5);
    }
  }
}

TEST_CASE("ecHT batch kernels: parallel equals serial") {
  const EchtEstimator est(EchtConfig{});
  std::mt19937_64 g(5);
  std::normal_distribution<double> nd;
  std::vector<double> x(5000);
  for (double& v : x) v = nd(g);
  std::vector<std::size_t> ends;
  for (std::size_t e = 249; e < x.size(); e += 3) ends.push_back(e);
  const auto a = echt_endpoints_serial(est, x, ends);
  const auto b = echt_endpoints(est, x, ends);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].phase_deg == b[i].phase_deg);
    CHECK(a[i].amplitude_uv == b[i].amplitude_uv);
  }
  const std::vector<std::size_t> bad{10};
  CHECK_THROWS_AS(echt_endpoints(est, x, bad), std::out_of_range);
}

TEST_CASE("ecHT rejects mismatched windows") {
  const EchtEstimator est(EchtConfig{});
  const std::vector<double> shorter(100, 0.0);
  CHECK_THROWS_AS(est.estimate(RealWindow(shorter, 250.0)), std::invalid_argument);
  const std::vector<double> right(250, 0.0);
  CHECK_THROWS_AS(est.estimate(RealWindow(right, 500.0)), std::invalid_argument);
  std::vector<double> nan(250, 0.0);
  nan[3] = std::nan("");
  CHECK_THROWS_AS(RealWindow(nan, 250.0), std::invalid_argument);
}

TEST_CASE("offline Hilbert recovers the phase of an interior tone") {
  const auto x = tone(2500, 10.0, 250.0, 30.0);
  const auto a = hilbert_offline(x, 250.0);
  for (std::size_t i = interior_begin(x.size()); i < interior_end(x.size()); ++i) {
    CHECK(circ_dist(a.phase_deg[i], wrap360(30.0 + 360.0 * 10.0 * static_cast<double>(i) / 250.0)) < 1e-6);
    CHECK(a.amplitude_uv[i] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("circular statistics against direct formulas") {
  std::mt19937_64 g(6);
  std::normal_distribution<double> nd(40.0, 30.0);
  std::vector<double> a(1000);
  for (double& v : a) v = wrap360(nd(g));
  const auto s = circ_stats(a);
  double c = 0.0, si = 0.0;
  for (double v : a) {
    c += std::cos(deg2rad(v));
    si += std::sin(deg2rad(v));
  }
  const double r = std::hypot(c, si) / static_cast<double>(a.size());
  CHECK(s.n == a.size());
  CHECK(s.resultant_length == doctest::Approx(r).epsilon(1e-12));
  CHECK(circ_dist(s.mean_deg, rad2deg(std::atan2(si, c))) < 1e-9);
  CHECK(s.angular_deviation_deg == doctest::Approx(rad2deg(std::sqrt(2.0 * (1.0 - r)))).epsilon(1e-12));
  CHECK(circ_dist(s.median_deg, 40.0) < 5.0);

  const std::vector<double> same(10, 123.0);
  const auto t = circ_stats(same);
  CHECK(t.resultant_length == doctest::Approx(1.0));
  CHECK(t.angular_deviation_deg < 1e-5);
  CHECK(circ_dist(t.median_deg, 123.0) < 1e-9);
  CHECK(angular_deviation_deg(0.7084) == doctest::Approx(43.76).epsilon(1e-3));
}

TEST_CASE("circular median minimizes summed arc distance") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(300.0, 420.0);
  std::vector<double> a(31);
  for (double& v : a) v = wrap360(u(g));
  const double m = circ_stats(a).median_deg;
  auto cost = [&](double c) {
    double s = 0.0;
    for (double v : a) s += circ_dist(v, c);
    return s;
  };
  for (double c = 0.0; c < 360.0; c += 0.5) CHECK(cost(m) <= cost(c) + 1e-9);
}

}  // TEST_SUITE
