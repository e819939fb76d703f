#include "alphaloop/analysis/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace alphaloop::analysis {

double f_upper_tail(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::invalid_argument("f_upper_tail: degrees of freedom must be positive");
  if (!(f >= 0.0)) throw std::invalid_argument("f_upper_tail: F must be >= 0");
  if (std::isinf(f)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<double>(d1, d2), f));
}

AnovaResult one_way_anova(const Groups& groups) {
  if (groups.size() < 2) throw std::invalid_argument("anova: need at least two groups");
  AnovaResult r;
  double grand = 0.0;
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("anova: every group needs at least two values");
    double s = 0.0;
    for (double v : g) {
      if (!std::isfinite(v)) throw std::invalid_argument("anova: non-finite observation");
      s += v;
    }
    r.means.push_back(s / static_cast<double>(g.size()));
    r.sizes.push_back(g.size());
    grand += s;
    total += g.size();
  }
  grand /= static_cast<double>(total);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double d = r.means[i] - grand;
    r.ss_between += static_cast<double>(r.sizes[i]) * d * d;
    for (double v : groups[i]) r.ss_within += (v - r.means[i]) * (v - r.means[i]);
  }
  r.df_between = static_cast<double>(groups.size() - 1);
  r.df_within = static_cast<double>(total - groups.size());
  if (!(r.ss_within > 0.0)) {
    throw std::invalid_argument("anova: zero within-group variance, F is undefined");
  }
  r.ms_within = r.ss_within / r.df_within;
  r.f = (r.ss_between / r.df_between) / r.ms_within;
  r.p = f_upper_tail(r.f, r.df_between, r.df_within);
  return r;
}

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

template <class F>
double panels(F&& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += Rule::integrate(f, lo + i * h, lo + (i + 1) * h);
  return s;
}

/// P(range of k iid standard normals ≤ w).
double range_cdf(double w, double k) {
  if (w <= 0.0) return 0.0;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [w, k, inv_sqrt_2pi](double z) {
    const double inside = norm_cdf(z) - norm_cdf(z - w);
    if (inside <= 0.0) return 0.0;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z) * std::pow(inside, k - 1.0);
  };
  const double v = k * panels(integrand, -8.5, 8.5 + w, 17 + static_cast<int>(std::ceil(w)));
  return std::min(1.0, v);
}

}  // namespace

double ptukey(double q, double k, double df) {
  if (!(k >= 2.0)) throw std::invalid_argument("ptukey: need k >= 2");
  if (!(df > 1.0)) throw std::invalid_argument("ptukey: need df > 1");
  if (std::isnan(q)) throw std::invalid_argument("ptukey: q is NaN");
  if (q <= 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df) || df > 1e6) return range_cdf(q, k);

  // s = sqrt(X / df), X ~ chi²(df): integrate range_cdf(q s) against the
  // density of s over its central 1 − 2e-15 mass.
  const boost::math::chi_squared_distribution<double> chi(df);
  const double s_lo = std::sqrt(boost::math::quantile(chi, 1e-15) / df);
  const double s_hi = std::sqrt(boost::math::quantile(boost::math::complement(chi, 1e-15)) / df);
  const double log_norm = std::log(2.0) + (df / 2.0) * std::log(df / 2.0) - std::lgamma(df / 2.0);
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double log_density = log_norm + (df - 1.0) * std::log(s) - df * s * s / 2.0;
    return std::exp(log_density) * range_cdf(q * s, k);
  };
  return std::clamp(panels(integrand, s_lo, s_hi, 12), 0.0, 1.0);
}

double qtukey(double p, double k, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("qtukey: p must be in (0, 1)");
  auto f = [p, k, df](double q) { return ptukey(q, k, df) - p; };
  double hi = 8.0;
  while (f(hi) < 0.0) hi *= 2.0;
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, hi, -p, f(hi),
                                                        boost::math::tools::eps_tolerance<double>(48), iters);
  return 0.5 * (a + b);
}

TukeyResult tukey_hsd(const Groups& groups, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("tukey: confidence must be in (0, 1)");
  TukeyResult r;
  r.anova = one_way_anova(groups);
  r.confidence = confidence;
  const double k = static_cast<double>(groups.size());
  const double df = r.anova.df_within;
  r.q_crit = qtukey(confidence, k, df);
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      TukeyPair pr;
      pr.a = a;
      pr.b = b;
      pr.diff = r.anova.means[b] - r.anova.means[a];
      const double se = std::sqrt(r.anova.ms_within / 2.0 *
                                  (1.0 / static_cast<double>(r.anova.sizes[a]) + 1.0 / static_cast<double>(r.anova.sizes[b])));
      pr.ci_low = pr.diff - r.q_crit * se;
      pr.ci_high = pr.diff + r.q_crit * se;
      pr.q = std::abs(pr.diff) / se;
      pr.p = std::clamp(1.0 - ptukey(pr.q, k, df), 0.0, 1.0);
      r.pairs.push_back(pr);
    }
  }
  return r;
}

}  // namespace alphaloop::analysis
