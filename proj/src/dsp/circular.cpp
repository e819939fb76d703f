#include "alphaloop/dsp/circular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "alphaloop/dsp/angles.hpp"

namespace alphaloop::dsp {

double angular_deviation_deg(double resultant_length) {
  const double r = std::clamp(resultant_length, 0.0, 1.0);
  return rad2deg(std::sqrt(2.0 * (1.0 - r)));
}

namespace {

// Sorted-sweep circular median: the objective is piecewise linear with convex
// kinks only at sample angles, so the minimum sits on a sample.
double circular_median(std::vector<double> a) {
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  std::vector<double> prefix(2 * n + 1, 0.0);
  for (std::size_t j = 0; j < 2 * n; ++j) {
    prefix[j + 1] = prefix[j] + (j < n ? a[j] : a[j - n] + 360.0);
  }
  auto ext = [&](std::size_t j) { return j < n ? a[j] : a[j - n] + 360.0; };

  std::vector<double> cost(n);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = a[i];
    r = std::max(r, i);
    while (r < i + n && ext(r) < theta + 180.0) ++r;
    const double fwd = (prefix[r] - prefix[i]) - static_cast<double>(r - i) * theta;
    const double bwd = static_cast<double>(i + n - r) * (theta + 360.0) - (prefix[i + n] - prefix[r]);
    cost[i] = fwd + bwd;
  }
  const double best = *std::min_element(cost.begin(), cost.end());
  const double tol = 1e-10 * 720.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (cost[i] <= best + tol) return a[i];
  }
  return a.front();
}

}  // namespace

CircularStats circ_stats(std::span<const double> angles_deg) {
  if (angles_deg.empty()) throw std::invalid_argument("circ_stats: need at least one angle");
  double sc = 0.0, ss = 0.0;
  std::vector<double> wrapped;
  wrapped.reserve(angles_deg.size());
  for (double a : angles_deg) {
    const double w = wrap360(a);  // throws on non-finite
    wrapped.push_back(w);
    sc += std::cos(deg2rad(w));
    ss += std::sin(deg2rad(w));
  }
  const double n = static_cast<double>(angles_deg.size());
  CircularStats s;
  s.n = angles_deg.size();
  s.resultant_length = std::min(1.0, std::hypot(sc, ss) / n);
  s.mean_deg = wrap360(rad2deg(std::atan2(ss, sc)));
  s.angular_deviation_deg = angular_deviation_deg(s.resultant_length);
  s.median_deg = circular_median(std::move(wrapped));
  return s;
}

}  // namespace alphaloop::dsp
