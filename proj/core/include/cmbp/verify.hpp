#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cmbp/model.hpp"

namespace cmbp {

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  std::size_t n_samples = 0;
};

// Exact sup-distance between the empirical CDF of the samples and `cdf`,
// with the asymptotic Kolmogorov p-value for sqrt(n) * statistic.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Distribution test for the scaled projected population at time t: samples
// of v^T Z_{floor(n t)} / n against the closed-form Gamma marginal. When
// the marginal is degenerate (zero noise) the statistic is instead the
// largest distance of any sample to the line value b*t, passed (p_value 1)
// when within 2*max(1, |b|)/n, the lattice resolution of the step process.
KsResult marginal_convergence(const ModelSpec& model, int n, double t, std::uint64_t N,
                              std::uint64_t master_seed, int threads = 1);

// Monte Carlo moment estimates on a geometric generation grid with the
// log-log slope fitted over the top decade.
struct GrowthReport {
  std::vector<std::int64_t> ks;
  Vec values;
  double fitted_exponent = 0.0;
  double target_exponent = 0.0;
  bool degenerate = false;  // moment vanished identically; no slope to fit
};

struct GrowthSuite {
  GrowthReport z_mean;    // E||Z_k||,   target exponent 1
  GrowthReport z_second;  // E||Z_k||^2, target exponent 2
  GrowthReport m_second;  // E||M_k||^2, target exponent 1
  GrowthReport m_fourth;  // E||M_k||^4, target exponent 2
  std::uint64_t overflowed = 0;
};

GrowthSuite moment_growth_check(const ModelSpec& model, std::int64_t k_max, std::uint64_t N,
                                std::uint64_t master_seed, int threads = 1);

// Concentration of relative type frequencies at time t. Ratios are gated
// exactly like the theory states them: trajectories with Z_j = 0 (for the
// pairwise ratio) or Z = 0 (for the share) contribute zero, never NaN.
struct FrequencyReport {
  double mean_ratio = 0.0;   // mean of 1{Z_j != 0} Z_i / Z_j over all trajectories
  double ratio_target = 0.0; // u_i / u_j
  double mean_share = 0.0;   // mean of 1{Z != 0} Z_i / sum(Z) over all trajectories
  double share_target = 0.0; // u_i
  double frac_ratio_within = 0.0;  // among trajectories with Z_j != 0
  double frac_share_within = 0.0;  // among nonextinct trajectories
  double delta = 0.0;
  std::uint64_t nonextinct = 0;
  std::uint64_t total = 0;
};

// i and j are 0-based type indices.
FrequencyReport relative_frequency_check(const ModelSpec& model, int n, double t,
                                         std::uint64_t N, std::uint64_t master_seed, int i,
                                         int j, double delta = 0.05, int threads = 1);

// Monte Carlo estimate of n^-2 sum_{k <= floor(nT)} E[||M_k||^2 1{||M_k|| > n theta}],
// the truncated quadratic mass that must vanish as n grows.
double lindeberg_diagnostic(const ModelSpec& model, int n, double T, double theta,
                            std::uint64_t N, std::uint64_t master_seed, int threads = 1);

}  // namespace cmbp
