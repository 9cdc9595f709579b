#include "cmbp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "cmbp/engine.hpp"
#include "cmbp/errors.hpp"
#include "cmbp/limit.hpp"
#include "cmbp/stats.hpp"

namespace cmbp {

namespace {

constexpr double kVanishTol = 1e-12;

double sq(double x) { return x * x; }

// Slope of log(value) against log(k) over the top decade of the grid,
// ordinary least squares. Points with nonpositive values cannot enter the
// fit; when fewer than two remain there is no slope to report.
bool fit_loglog(const std::vector<std::int64_t>& ks, const Vec& values, std::int64_t k_max,
                double* slope) {
  const double k_lo = static_cast<double>(k_max) / 10.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (std::size_t g = 0; g < ks.size(); ++g) {
    if (static_cast<double>(ks[g]) < k_lo) continue;
    if (!(values[g] > 0.0)) continue;
    const double x = std::log(static_cast<double>(ks[g]));
    const double y = std::log(values[g]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2) return false;
  const double den = used * sxx - sx * sx;
  if (!(den > 0.0)) return false;
  *slope = (used * sxy - sx * sy) / den;
  return true;
}

GrowthReport make_growth_report(const std::vector<std::int64_t>& ks, Vec values,
                                std::int64_t k_max, double target) {
  GrowthReport rep;
  rep.ks = ks;
  rep.values = std::move(values);
  rep.target_exponent = target;
  const bool vanished = std::all_of(rep.values.begin(), rep.values.end(),
                                    [](double v) { return v < kVanishTol; });
  double slope = 0.0;
  if (vanished || !fit_loglog(ks, rep.values, k_max, &slope)) {
    rep.degenerate = true;
    rep.fitted_exponent = 0.0;
  } else {
    rep.fitted_exponent = slope;
  }
  return rep;
}

}  // namespace

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ConfigError("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  const double dn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, f - static_cast<double>(i) / dn);
    d = std::max(d, static_cast<double>(i + 1) / dn - f);
  }
  KsResult res;
  res.statistic = d;
  res.p_value = kolmogorov_sf(std::sqrt(dn) * d);
  res.n_samples = n;
  return res;
}

KsResult marginal_convergence(const ModelSpec& model, int n, double t, std::uint64_t N,
                              std::uint64_t master_seed, int threads) {
  if (n < 1) throw ConfigError("marginal_convergence: n must be positive");
  if (!(t > 0.0)) throw ConfigError("marginal_convergence: t must be positive");
  const LimitCoefficients lc = limit_coefficients(model);
  const CriticalityReport report = classify(model);
  const Vec& v = report.spectral->v;
  const GammaMarginal marginal = gamma_marginal(lc.drift, lc.diffusion, t);

  const auto idx = static_cast<std::size_t>(std::floor(static_cast<double>(n) * t));
  auto result = monte_carlo(
      model, n, t, N, master_seed,
      [&](const Trajectory& traj) -> double {
        const IVec& z = traj.steps.at(idx);
        double proj = 0.0;
        for (int l = 0; l < traj.p; ++l) proj += v[l] * static_cast<double>(z[l]);
        return proj / static_cast<double>(n);
      },
      threads);

  std::vector<double> samples;
  samples.reserve(result.records.size());
  for (std::uint64_t id = 0; id < result.records.size(); ++id) {
    if (!result.outcome.overflowed_id(id)) samples.push_back(result.records[id]);
  }
  if (samples.empty()) throw NumericError("marginal_convergence: every trajectory overflowed");

  if (marginal.kind == GammaMarginal::Kind::Gamma) {
    return ks_test(std::move(samples), [marginal](double x) { return marginal.cdf(x); });
  }
  // Zero-noise marginal: the law is the point b*t, so distribution distance
  // degenerates to the worst deviation from the line. The pass tolerance is
  // the lattice resolution of Z/n around that point.
  KsResult res;
  res.n_samples = samples.size();
  for (double s : samples) res.statistic = std::max(res.statistic, std::abs(s - marginal.line_value));
  const double tol = 2.0 * std::max(1.0, std::abs(lc.drift)) / static_cast<double>(n);
  res.p_value = res.statistic <= tol ? 1.0 : 0.0;
  return res;
}

GrowthSuite moment_growth_check(const ModelSpec& model, std::int64_t k_max, std::uint64_t N,
                                std::uint64_t master_seed, int threads) {
  if (k_max < 1) throw ConfigError("moment_growth_check: k_max must be positive");
  if (N < 1) throw ConfigError("moment_growth_check: need at least one trajectory");

  // Geometric generation grid, about eight points per decade, always ending
  // exactly at k_max.
  std::vector<std::int64_t> ks;
  const double ratio = std::pow(10.0, 1.0 / 8.0);
  for (std::int64_t k = 1; k < k_max;) {
    ks.push_back(k);
    const auto next = static_cast<std::int64_t>(std::llround(static_cast<double>(k) * ratio));
    k = std::max(k + 1, next);
  }
  ks.push_back(k_max);
  const std::size_t G = ks.size();

  struct Sample {
    Vec z1, z2, m2, m4;
  };

  McOutcome outcome;
  auto records = parallel_map_ordered(
      N, threads,
      [&](std::uint64_t id) -> Sample {
        Sample s;
        s.z1.assign(G, 0.0);
        s.z2.assign(G, 0.0);
        s.m2.assign(G, 0.0);
        s.m4.assign(G, 0.0);
        Simulation sim(model, id, master_seed);
        IVec prev = sim.state();
        std::size_t g = 0;
        for (std::int64_t k = 1; k <= k_max && g < G; ++k) {
          sim.advance();
          if (k == ks[g]) {
            const IVec& z = sim.state();
            const Vec mean = conditional_mean(model, prev);
            double nz2 = 0.0, nm2 = 0.0;
            for (int l = 0; l < model.p(); ++l) {
              nz2 += sq(static_cast<double>(z[l]));
              nm2 += sq(static_cast<double>(z[l]) - mean[l]);
            }
            s.z1[g] = std::sqrt(nz2);
            s.z2[g] = nz2;
            s.m2[g] = nm2;
            s.m4[g] = nm2 * nm2;
            ++g;
          }
          prev = sim.state();
        }
        return s;
      },
      &outcome);

  Vec z1(G, 0.0), z2(G, 0.0), m2(G, 0.0), m4(G, 0.0);
  std::uint64_t ok = 0;
  for (std::uint64_t id = 0; id < records.size(); ++id) {
    if (outcome.overflowed_id(id)) continue;
    ++ok;
    for (std::size_t g = 0; g < G; ++g) {
      z1[g] += records[id].z1[g];
      z2[g] += records[id].z2[g];
      m2[g] += records[id].m2[g];
      m4[g] += records[id].m4[g];
    }
  }
  if (ok == 0) throw NumericError("moment_growth_check: every trajectory overflowed");
  for (std::size_t g = 0; g < G; ++g) {
    z1[g] /= static_cast<double>(ok);
    z2[g] /= static_cast<double>(ok);
    m2[g] /= static_cast<double>(ok);
    m4[g] /= static_cast<double>(ok);
  }

  GrowthSuite suite;
  suite.z_mean = make_growth_report(ks, std::move(z1), k_max, 1.0);
  suite.z_second = make_growth_report(ks, std::move(z2), k_max, 2.0);
  suite.m_second = make_growth_report(ks, std::move(m2), k_max, 1.0);
  suite.m_fourth = make_growth_report(ks, std::move(m4), k_max, 2.0);
  suite.overflowed = outcome.overflowed.size();
  return suite;
}

FrequencyReport relative_frequency_check(const ModelSpec& model, int n, double t,
                                         std::uint64_t N, std::uint64_t master_seed, int i,
                                         int j, double delta, int threads) {
  if (n < 1) throw ConfigError("relative_frequency_check: n must be positive");
  if (!(t > 0.0)) throw ConfigError("relative_frequency_check: t must be positive");
  if (i < 0 || i >= model.p() || j < 0 || j >= model.p())
    throw ConfigError("relative_frequency_check: type index out of range");
  if (!(delta > 0.0)) throw ConfigError("relative_frequency_check: delta must be positive");

  const CriticalityReport report = classify(model);
  if (!report.spectral)
    throw ConfigError("relative_frequency_check: dominant direction unavailable: " + report.note);
  const Vec& u = report.spectral->u;
  if (!(u[static_cast<std::size_t>(j)] > 0.0))
    throw ConfigError("relative_frequency_check: reference type has zero limit share");

  FrequencyReport rep;
  rep.delta = delta;
  rep.ratio_target = u[static_cast<std::size_t>(i)] / u[static_cast<std::size_t>(j)];
  rep.share_target = u[static_cast<std::size_t>(i)];

  struct Rec {
    double ratio = 0.0;
    double share = 0.0;
    bool ref_positive = false;
    bool alive = false;
  };

  const auto idx = static_cast<std::size_t>(std::floor(static_cast<double>(n) * t));
  auto result = monte_carlo(
      model, n, t, N, master_seed,
      [&](const Trajectory& traj) -> Rec {
        Rec r;
        const IVec& z = traj.steps.at(idx);
        std::int64_t total = 0;
        for (auto c : z) total += c;
        if (z[static_cast<std::size_t>(j)] > 0) {
          r.ref_positive = true;
          r.ratio = static_cast<double>(z[static_cast<std::size_t>(i)]) /
                    static_cast<double>(z[static_cast<std::size_t>(j)]);
        }
        if (total > 0) {
          r.alive = true;
          r.share = static_cast<double>(z[static_cast<std::size_t>(i)]) / static_cast<double>(total);
        }
        return r;
      },
      threads);

  std::uint64_t ok = 0, ref_positive = 0, ratio_within = 0, share_within = 0;
  double sum_ratio = 0.0, sum_share = 0.0;
  for (std::uint64_t id = 0; id < result.records.size(); ++id) {
    if (result.outcome.overflowed_id(id)) continue;
    const Rec& r = result.records[id];
    ++ok;
    sum_ratio += r.ratio;
    sum_share += r.share;
    if (r.ref_positive && std::abs(r.ratio - rep.ratio_target) <= delta) ++ratio_within;
    if (r.ref_positive) ++ref_positive;
    if (r.alive) {
      ++rep.nonextinct;
      if (std::abs(r.share - rep.share_target) <= delta) ++share_within;
    }
  }
  if (ok == 0) throw NumericError("relative_frequency_check: every trajectory overflowed");
  rep.total = ok;
  rep.mean_ratio = sum_ratio / static_cast<double>(ok);
  rep.mean_share = sum_share / static_cast<double>(ok);
  rep.frac_ratio_within =
      ref_positive == 0 ? 0.0 : static_cast<double>(ratio_within) / static_cast<double>(ref_positive);
  rep.frac_share_within =
      rep.nonextinct == 0 ? 0.0
                          : static_cast<double>(share_within) / static_cast<double>(rep.nonextinct);
  return rep;
}

double lindeberg_diagnostic(const ModelSpec& model, int n, double T, double theta,
                            std::uint64_t N, std::uint64_t master_seed, int threads) {
  if (n < 1) throw ConfigError("lindeberg_diagnostic: n must be positive");
  if (!(T > 0.0)) throw ConfigError("lindeberg_diagnostic: T must be positive");
  if (!(theta > 0.0)) throw ConfigError("lindeberg_diagnostic: theta must be positive");

  const auto K = static_cast<std::size_t>(std::floor(static_cast<double>(n) * T));
  const double cut = static_cast<double>(n) * theta;
  auto result = monte_carlo(
      model, n, T, N, master_seed,
      [&](const Trajectory& traj) -> double {
        double s = 0.0;
        for (std::size_t k = 1; k <= K; ++k) {
          const Vec mean = conditional_mean(model, traj.steps[k - 1]);
          double nm2 = 0.0;
          for (int l = 0; l < traj.p; ++l)
            nm2 += sq(static_cast<double>(traj.steps[k][l]) - mean[l]);
          if (std::sqrt(nm2) > cut) s += nm2;
        }
        return s;
      },
      threads);

  double sum = 0.0;
  std::uint64_t ok = 0;
  for (std::uint64_t id = 0; id < result.records.size(); ++id) {
    if (result.outcome.overflowed_id(id)) continue;
    sum += result.records[id];
    ++ok;
  }
  if (ok == 0) throw NumericError("lindeberg_diagnostic: every trajectory overflowed");
  return sum / static_cast<double>(ok) / sq(static_cast<double>(n));
}

}  // namespace cmbp
