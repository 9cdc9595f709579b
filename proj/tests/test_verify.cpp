#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cmbp/errors.hpp"
#include "cmbp/presets.hpp"
#include "cmbp/rng.hpp"
#include "cmbp/verify.hpp"
#include "helpers.hpp"

using cmbp::DiscreteLaw;
using cmbp::ModelSpec;
using cmbp::Vec;

namespace {

ModelSpec critical_promiscuous() {
  return cmbp::presets::two_sex_promiscuous(
      DiscreteLaw::product({DiscreteLaw::poisson1(1.0), DiscreteLaw::poisson1(1.0)}),
      DiscreteLaw::product({DiscreteLaw::poisson1(1.0), DiscreteLaw::deterministic1(1)}));
}

double exp_cdf(double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); }

std::vector<double> exp_samples(std::size_t n, std::uint64_t seed) {
  cmbp::RngStream rng = cmbp::RngStream::from_root(seed, 0);
  std::vector<double> xs(n);
  for (auto& x : xs) x = -std::log(rng.next_unit_pos());
  return xs;
}

}  // namespace

TEST_CASE("ks statistic on tiny hand-checked inputs") {
  auto one = cmbp::ks_test({0.5}, [](double x) { return x; });
  CHECK(one.statistic == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(one.n_samples == 1);

  auto two = cmbp::ks_test({0.75, 0.25}, [](double x) { return x; });
  CHECK(two.statistic == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(two.p_value >= 0.999);

  CHECK_THROWS_AS(cmbp::ks_test({}, [](double x) { return x; }), cmbp::ConfigError);
}

TEST_CASE("ks statistic is invariant under monotone reparameterization") {
  auto xs = exp_samples(400, 11);
  auto base = cmbp::ks_test(xs, exp_cdf);
  std::vector<double> squared;
  for (double x : xs) squared.push_back(x * x);
  auto mapped = cmbp::ks_test(squared, [](double y) {
    return y <= 0.0 ? 0.0 : 1.0 - std::exp(-std::sqrt(y));
  });
  CHECK(mapped.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
}

TEST_CASE("ks test separates right and wrong models") {
  auto xs = exp_samples(2000, 21);
  auto right = cmbp::ks_test(xs, exp_cdf);
  CHECK(right.p_value >= 0.01);
  // Exp(1) data against an Exp(1/2) cdf: sup distance 1/4, decisively out.
  auto wrong = cmbp::ks_test(xs, [](double x) {
    return x <= 0.0 ? 0.0 : 1.0 - std::exp(-0.5 * x);
  });
  CHECK(wrong.statistic >= 0.15);
  CHECK(wrong.p_value <= 1e-10);
}

TEST_CASE("ks p-values are calibrated at the 1% level") {
  // 500 independent datasets from the exact null: the number of p < 0.01
  // rejections is Binomial(500, 0.01); demanding <= 10 leaves odds of a
  // false alarm around 2e-3, and these seeds are frozen anyway.
  int rejections = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto res = cmbp::ks_test(exp_samples(2000, seed), exp_cdf);
    if (res.p_value < 0.01) ++rejections;
  }
  CHECK(rejections <= 10);
}

TEST_CASE("scaled marginal of the promiscuous model matches its gamma law") {
  auto res = cmbp::marginal_convergence(critical_promiscuous(), 400, 1.0, 1000, 2025);
  CHECK(res.n_samples == 1000);
  CHECK(res.p_value >= 0.005);

  CHECK_THROWS_AS(cmbp::marginal_convergence(critical_promiscuous(), 0, 1.0, 10, 1),
                  cmbp::ConfigError);
  CHECK_THROWS_AS(cmbp::marginal_convergence(critical_promiscuous(), 10, 0.0, 10, 1),
                  cmbp::ConfigError);

  // Non-critical models are refused before any simulation.
  ModelSpec sub = cmbp::presets::two_sex_promiscuous(
      DiscreteLaw::product({DiscreteLaw::poisson1(0.8), DiscreteLaw::poisson1(1.0)}),
      DiscreteLaw::product({DiscreteLaw::poisson1(1.0), DiscreteLaw::deterministic1(1)}));
  CHECK_THROWS_AS(cmbp::marginal_convergence(sub, 100, 1.0, 10, 1), cmbp::Error);
}

TEST_CASE("zero-noise marginals degenerate to a line check") {
  auto res = cmbp::marginal_convergence(cmbp::presets::deterministic_ray(), 50, 1.0, 20, 7);
  CHECK(res.p_value == 1.0);
  CHECK(res.statistic <= 2.0 / 50 + 1e-12);
}

TEST_CASE("moment growth on the ray is exactly polynomial") {
  auto suite = cmbp::moment_growth_check(cmbp::presets::deterministic_ray(), 2000000, 1, 3);
  CHECK(suite.overflowed == 0);
  CHECK(suite.z_mean.target_exponent == 1.0);
  CHECK(suite.z_second.target_exponent == 2.0);
  CHECK(suite.m_second.target_exponent == 1.0);
  CHECK(suite.m_fourth.target_exponent == 2.0);
  // ||Z_k|| = k + 1, so the top-decade slope sits within 1e-5 of 1.
  CHECK_FALSE(suite.z_mean.degenerate);
  CHECK(suite.z_mean.fitted_exponent == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_FALSE(suite.z_second.degenerate);
  CHECK(suite.z_second.fitted_exponent == doctest::Approx(2.0).epsilon(1e-4));
  // The martingale part vanishes identically: no slope to fit.
  CHECK(suite.m_second.degenerate);
  CHECK(suite.m_fourth.degenerate);
  REQUIRE_FALSE(suite.z_mean.ks.empty());
  CHECK(suite.z_mean.ks.back() == 2000000);
  CHECK(std::is_sorted(suite.z_mean.ks.begin(), suite.z_mean.ks.end()));
  REQUIRE(suite.z_mean.values.size() == suite.z_mean.ks.size());
  // E||Z_k|| is exactly k + 1 on the grid.
  for (std::size_t g = 0; g < suite.z_mean.ks.size(); ++g)
    CHECK(suite.z_mean.values[g] ==
          doctest::Approx(static_cast<double>(suite.z_mean.ks[g]) + 1.0).epsilon(1e-12));
}

TEST_CASE("moment growth of the promiscuous model tracks the critical exponents") {
  auto suite = cmbp::moment_growth_check(critical_promiscuous(), 2000, 150, 5);
  CHECK(suite.overflowed == 0);
  CHECK_FALSE(suite.z_mean.degenerate);
  CHECK_FALSE(suite.z_second.degenerate);
  CHECK_FALSE(suite.m_second.degenerate);
  CHECK_FALSE(suite.m_fourth.degenerate);
  CHECK(suite.z_mean.fitted_exponent == doctest::Approx(1.0).epsilon(0.3));
  CHECK(suite.z_second.fitted_exponent == doctest::Approx(2.0).epsilon(0.25));
  CHECK(suite.m_second.fitted_exponent == doctest::Approx(1.0).epsilon(0.4));
  CHECK(suite.m_fourth.fitted_exponent == doctest::Approx(2.0).epsilon(0.35));
  for (double v : suite.z_mean.values) CHECK(v > 0.0);
  CHECK_THROWS_AS(cmbp::moment_growth_check(critical_promiscuous(), 0, 10, 1),
                  cmbp::ConfigError);
  CHECK_THROWS_AS(cmbp::moment_growth_check(critical_promiscuous(), 100, 0, 1),
                  cmbp::ConfigError);
}

TEST_CASE("relative frequencies concentrate on the dominant direction") {
  auto rep = cmbp::relative_frequency_check(critical_promiscuous(), 500, 1.0, 800, 12, 0, 1);
  CHECK(rep.total == 800);
  // Immigration guarantees a male every generation, so nothing is extinct.
  CHECK(rep.nonextinct == 800);
  CHECK(rep.ratio_target == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.share_target == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep.delta == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(rep.mean_ratio > 0.8);
  CHECK(rep.mean_ratio < 1.25);
  CHECK(rep.mean_share == doctest::Approx(0.5).epsilon(0.1));
  CHECK(rep.frac_share_within >= 0.9);
  CHECK(rep.frac_ratio_within >= 0.0);
  CHECK(rep.frac_ratio_within <= 1.0);
}

TEST_CASE("frequency gating never produces NaN on extinct paths") {
  auto rep =
      cmbp::relative_frequency_check(cmbp::presets::uniform_migration(), 60, 1.0, 600, 9, 0, 1);
  CHECK(rep.total == 600);
  CHECK(rep.nonextinct < rep.total);  // plenty of extinctions at this horizon
  CHECK(std::isfinite(rep.mean_ratio));
  CHECK(std::isfinite(rep.mean_share));
  CHECK(rep.frac_ratio_within >= 0.0);
  CHECK(rep.frac_ratio_within <= 1.0);
  CHECK(rep.frac_share_within >= 0.0);
  CHECK(rep.frac_share_within <= 1.0);
}

TEST_CASE("frequency check validates its type indices") {
  ModelSpec model = critical_promiscuous();
  CHECK_THROWS_AS(cmbp::relative_frequency_check(model, 10, 1.0, 10, 1, 0, 2), cmbp::Error);
  CHECK_THROWS_AS(cmbp::relative_frequency_check(model, 10, 1.0, 10, 1, -1, 1), cmbp::Error);
  // Reference type with zero dominant share: the ratio target is undefined.
  ModelSpec emb = cmbp::presets::mbpi_embedding(
      {DiscreteLaw::poisson(Vec{0.5, 0.5}), DiscreteLaw::poisson(Vec{0.5, 0.5})},
      DiscreteLaw::poisson(Vec{0.7, 0.2}));
  CHECK_THROWS_AS(cmbp::relative_frequency_check(emb, 10, 1.0, 10, 1, 0, 2), cmbp::Error);
}

TEST_CASE("truncated quadratic mass vanishes with n") {
  ModelSpec model = critical_promiscuous();
  // Deterministic paths have no martingale mass at all.
  CHECK(cmbp::lindeberg_diagnostic(cmbp::presets::deterministic_ray(), 50, 1.0, 0.5, 20, 1) ==
        doctest::Approx(0.0).scale(1.0));
  // A huge threshold is never exceeded.
  CHECK(cmbp::lindeberg_diagnostic(model, 10, 1.0, 1e6, 200, 1) ==
        doctest::Approx(0.0).scale(1.0));

  std::vector<double> small, big;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    small.push_back(cmbp::lindeberg_diagnostic(model, 10, 1.0, 0.5, 400, seed));
    big.push_back(cmbp::lindeberg_diagnostic(model, 100, 1.0, 0.5, 400, seed));
  }
  CHECK(testutil::median(small) > 0.0);  // the threshold bites at small n
  CHECK(testutil::median(big) < testutil::median(small));
  int improved = 0;
  for (std::size_t s = 0; s < small.size(); ++s)
    if (big[s] <= small[s]) ++improved;
  CHECK(improved >= 4);
}
