#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "../oracles.hpp"
#include "alphaloop/analysis/stats.hpp"
#include "doctest.h"

using namespace alphaloop::analysis;

namespace {

// Seven values with the given mean and sum of squared deviations.
std::vector<double> group_with(double mean, double ss) {
  const std::vector<double> base{-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0};  // ss = 28
  std::vector<double> g;
  for (double b : base) g.push_back(mean + b * std::sqrt(ss / 28.0));
  return g;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("F upper tail matches density quadrature and the quoted result") {
  for (double f : {0.1, 1.0, 2.5, 5.8478, 12.0}) {
    for (auto [d1, d2] : {std::pair{2.0, 18.0}, std::pair{2.0, 66.0}, std::pair{4.0, 7.0}}) {
      CHECK(f_upper_tail(f, d1, d2) == doctest::Approx(oracle::f_upper_tail(f, d1, d2)).epsilon(1e-10));
    }
  }
  CHECK(f_upper_tail(5.8478, 2.0, 18.0) == doctest::Approx(0.011).epsilon(0.001 / 0.011));
  CHECK(f_upper_tail(0.9938, 2.0, 66.0) == doctest::Approx(0.3756).epsilon(0.0005 / 0.3756));
  CHECK(f_upper_tail(0.0, 2.0, 18.0) == 1.0);
}

TEST_CASE("ptukey matches the adaptive-quadrature oracle") {
  for (double q : {0.5, 2.0, 3.609, 5.0, 7.5}) {
    for (int k : {2, 3, 4, 6}) {
      for (double df : {2.0, 5.0, 18.0, 66.0}) {
        CHECK(ptukey(q, k, df) == doctest::Approx(oracle::ptukey(q, k, df)).epsilon(1e-10).scale(1.0));
      }
    }
    CHECK(ptukey(q, 3, 1e7) == doctest::Approx(oracle::range_cdf(q, 3)).epsilon(1e-10).scale(1.0));
  }
  CHECK(ptukey(0.0, 3, 10) == 0.0);
  CHECK_THROWS_AS(ptukey(1.0, 1, 10), std::invalid_argument);
}

TEST_CASE("qtukey inverts ptukey and matches published and oracle values") {
  const double q = qtukey(0.95, 3, 18);
  CHECK(q == doctest::Approx(oracle::qtukey(0.95, 3, 18)).epsilon(1e-11));
  CHECK(q == doctest::Approx(3.609).epsilon(5e-4 / 3.609));
  CHECK(ptukey(q, 3, 18) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(qtukey(0.95, 4, 20) == doctest::Approx(3.958).epsilon(5e-4 / 3.958));
  // k = 2 reduces to the two-sided t quantile times sqrt(2)
  for (double df : {5.0, 12.0, 40.0}) {
    const boost::math::students_t t(df);
    CHECK(qtukey(0.95, 2, df) == doctest::Approx(std::sqrt(2.0) * boost::math::quantile(t, 0.975)).epsilon(1e-10));
  }
}

TEST_CASE("ANOVA trivial and error cases") {
  const Groups same{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  const auto a = one_way_anova(same);
  CHECK(a.f == 0.0);
  CHECK(a.p == doctest::Approx(1.0));
  const auto t = tukey_hsd(same);
  for (const auto& p : t.pairs) {
    CHECK(p.diff == 0.0);
    CHECK(p.ci_low == doctest::Approx(-p.ci_high));
    CHECK(p.p == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(one_way_anova(Groups{{1, 1}, {2, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(one_way_anova(Groups{{1, 2, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(one_way_anova(Groups{{1}, {2, 3}}), std::invalid_argument);
}

TEST_CASE("ANOVA example against the textbook formula") {
  const Groups g{{3, 4, 5}, {5, 6, 7}, {8, 9, 10}};
  const auto a = one_way_anova(g);
  const auto o = oracle::anova(g);
  CHECK(a.f == doctest::Approx(o.f).epsilon(1e-12));
  CHECK(a.f == doctest::Approx(19.0));
  CHECK(a.p == doctest::Approx(o.p).epsilon(1e-9));
  CHECK(a.df_between == 2.0);
  CHECK(a.df_within == 6.0);
}

TEST_CASE("ANOVA and Tukey-Kramer agree with the oracle to 1e-9 on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> kd(2, 4), nd(2, 7);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int inst = 0; inst < 50; ++inst) {
    Groups g(static_cast<std::size_t>(kd(rng)));
    for (auto& grp : g) {
      const double shift = 3.0 * noise(rng);
      grp.resize(static_cast<std::size_t>(nd(rng)));
      for (double& v : grp) v = shift + noise(rng);
    }
    const auto r = tukey_hsd(g);
    const auto o = oracle::anova(g);
    CHECK(r.anova.f == doctest::Approx(o.f).epsilon(1e-9));
    CHECK(r.anova.p == doctest::Approx(o.p).epsilon(1e-9).scale(1.0));
    CHECK(r.anova.ms_within == doctest::Approx(o.msw).epsilon(1e-9));
    const double qcrit = oracle::qtukey(0.95, static_cast<int>(g.size()), o.df_within);
    CHECK(r.q_crit == doctest::Approx(qcrit).epsilon(1e-9));
    for (const auto& p : r.pairs) {
      const auto op = oracle::tukey_pair(g, p.a, p.b, o, qcrit);
      CHECK(p.diff == doctest::Approx(op.diff).epsilon(1e-9).scale(1.0));
      CHECK(p.ci_low == doctest::Approx(op.lo).epsilon(1e-9).scale(1.0));
      CHECK(p.ci_high == doctest::Approx(op.hi).epsilon(1e-9).scale(1.0));
      CHECK(p.p == doctest::Approx(op.p).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("two groups: CI excludes zero exactly when ANOVA p < 0.05") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    Groups g(2);
    const double sep = 0.25 * rep;
    for (int i = 0; i < 7; ++i) {
      g[0].push_back(noise(rng));
      g[1].push_back(sep + noise(rng));
    }
    const auto r = tukey_hsd(g);
    const bool excludes = r.pairs[0].ci_low > 0.0 || r.pairs[0].ci_high < 0.0;
    CHECK(excludes == (r.anova.p < 0.05));
    CHECK(r.pairs[0].p == doctest::Approx(r.anova.p).epsilon(1e-9));
  }
}

TEST_CASE("reconstructed poor-sleeper groups reproduce the reported statistics") {
  // Means from the reported Tukey intervals; within-group SS chosen for MSW = 130.48.
  const double msw = 130.48;
  const double ss = msw * 18.0 / 3.0;
  const Groups g{group_with(35.3, ss), group_with(35.3 - 15.8869, ss), group_with(35.3 - 19.6786, ss)};
  const auto r = tukey_hsd(g);
  CHECK(r.anova.f == doctest::Approx(5.8478).epsilon(0.001));
  CHECK(r.anova.p == doctest::Approx(0.011).epsilon(0.001 / 0.011));
  const auto& trough = r.pairs[0];  // (control, trough)
  const auto& peak = r.pairs[1];    // (control, peak)
  const auto& between = r.pairs[2];
  CHECK(peak.ci_low == doctest::Approx(-35.2614).epsilon(2e-3 / 35.0));
  CHECK(peak.ci_high == doctest::Approx(-4.0958).epsilon(2e-3 / 4.0));
  CHECK(trough.ci_low == doctest::Approx(-31.4697).epsilon(2e-3 / 31.0));
  CHECK(trough.ci_high == doctest::Approx(-0.3041).epsilon(2e-3 / 0.3));
  CHECK(peak.p == doctest::Approx(0.0125).epsilon(0.0005 / 0.0125));
  CHECK(trough.p == doctest::Approx(0.0453).epsilon(0.0005 / 0.0453));
  CHECK(between.p == doctest::Approx(0.8106).epsilon(0.0005 / 0.8106));
}

}  // TEST_SUITE
