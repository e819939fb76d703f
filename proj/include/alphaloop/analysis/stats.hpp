#pragma once

#include <cstddef>
#include <vector>

namespace alphaloop::analysis {

using Groups = std::vector<std::vector<double>>;

struct AnovaResult {
  double f = 0.0;
  double df_between = 0.0;
  double df_within = 0.0;
  double p = 1.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double ms_within = 0.0;
  std::vector<double> means;
  std::vector<std::size_t> sizes;
};

/// One-way ANOVA. Requires ≥ 2 groups of ≥ 2 values each and non-zero
/// within-group variance; p is the F upper tail.
AnovaResult one_way_anova(const Groups& groups);

/// Upper tail P(F > f) for F(d1, d2).
double f_upper_tail(double f, double d1, double d2);

/// Pair (a, b) with a < b; diff = mean[b] − mean[a].
struct TukeyPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double diff = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double q = 0.0;
  double p = 1.0;
};

struct TukeyResult {
  AnovaResult anova;
  double q_crit = 0.0;
  double confidence = 0.95;
  std::vector<TukeyPair> pairs;
};

/// Tukey-Kramer honestly significant difference on all group pairs.
TukeyResult tukey_hsd(const Groups& groups, double confidence = 0.95);

/// CDF of the studentized range for k means and df error degrees of freedom
/// (df = +inf allowed).
double ptukey(double q, double k, double df);
/// Quantile: the q with ptukey(q, k, df) = p.
double qtukey(double p, double k, double df);

}  // namespace alphaloop::analysis
