#include "cmbp/sampling.hpp"

#include <cmath>
#include <string>

#include "cmbp/errors.hpp"

namespace cmbp {

namespace {

constexpr double kPoissonInversionCutoff = 10.0;
constexpr std::int64_t kBernoulliCutoff = 64;
constexpr double kWaitingTimeCutoff = 30.0;
constexpr double kMaxCount = 9.2e18;  // just under 2^63-1

// Hormann's PTRS rejection for Poisson, valid for rate >= 10.
std::int64_t poisson_ptrs(RngStream& rng, double rate) {
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double U = rng.next_unit() - 0.5;
    double V = rng.next_unit_pos();
    double us = 0.5 - std::abs(U);
    double kf = std::floor((2.0 * a / us + b) * U + rate + 0.43);
    if (us >= 0.07 && V <= v_r) {
      if (kf > kMaxCount) throw OverflowError("poisson_sample: draw exceeds 64-bit range");
      return static_cast<std::int64_t>(kf);
    }
    if (kf < 0.0 || (us < 0.013 && V > us)) continue;
    if (std::log(V * inv_alpha / (a / (us * us) + b)) <=
        kf * loglam - rate - std::lgamma(kf + 1.0)) {
      if (kf > kMaxCount) throw OverflowError("poisson_sample: draw exceeds 64-bit range");
      return static_cast<std::int64_t>(kf);
    }
  }
}

std::int64_t poisson_inversion(RngStream& rng, double rate) {
  const double L = std::exp(-rate);
  std::int64_t k = 0;
  double prod = rng.next_unit_pos();
  while (prod > L) {
    ++k;
    prod *= rng.next_unit_pos();
  }
  return k;
}

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Counts successes among n Bernoulli(p) trials by skipping geometric gaps;
// expected cost O(n p).
std::int64_t binomial_waiting(RngStream& rng, std::int64_t n, double p) {
  if (p <= 0.0) return 0;
  const double lq = std::log1p(-p);
  std::int64_t count = 0;
  double pos = 0.0;
  for (;;) {
    pos += std::floor(std::log(rng.next_unit_pos()) / lq) + 1.0;
    if (pos > static_cast<double>(n)) return count;
    ++count;
  }
}

std::int64_t binomial_bernoulli(RngStream& rng, std::int64_t n, double p) {
  std::int64_t c = 0;
  for (std::int64_t i = 0; i < n; ++i)
    if (rng.next_unit() < p) ++c;
  return c;
}

double beta_sample(RngStream& rng, double a, double b) {
  double x = gamma_sample(rng, a);
  double y = gamma_sample(rng, b);
  double s = x + y;
  if (s <= 0.0) return 0.5;  // both underflowed; exact value is immaterial at this measure-zero event
  return x / s;
}

}  // namespace

double gamma_sample(RngStream& rng, double shape) {
  if (!(shape > 0.0)) throw ConfigError("gamma_sample: shape must be positive");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back by U^(1/shape).
    double u = rng.next_unit_pos();
    return gamma_sample(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.next_normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = rng.next_unit_pos();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::int64_t poisson_sample(RngStream& rng, double rate) {
  if (rate < 0.0 || !std::isfinite(rate)) throw ConfigError("poisson_sample: bad rate");
  if (rate == 0.0) return 0;
  if (rate < kPoissonInversionCutoff) return poisson_inversion(rng, rate);
  return poisson_ptrs(rng, rate);
}

std::int64_t binomial_sample(RngStream& rng, std::int64_t n, double prob) {
  if (n < 0) throw ConfigError("binomial_sample: negative count");
  if (prob < 0.0 || prob > 1.0 || !std::isfinite(prob))
    throw ConfigError("binomial_sample: probability outside [0,1]");
  std::int64_t base = 0;  // accumulated successes from beta splits
  for (;;) {
    if (prob > 0.5) {
      // successes at p are failures at 1-p
      return base + (n - binomial_sample(rng, n, 1.0 - prob));
    }
    if (n == 0 || prob == 0.0) return base;
    if (n <= kBernoulliCutoff) return base + binomial_bernoulli(rng, n, prob);
    if (static_cast<double>(n) * prob <= kWaitingTimeCutoff)
      return base + binomial_waiting(rng, n, prob);

    // Order-statistic split: with a = floor((n+1)/2), the a-th smallest of
    // n uniforms is Beta(a, n-a+1); conditioning on it lands the count in
    // one of two smaller binomials. Halves n per round.
    std::int64_t a = (n + 1) / 2;
    double x = beta_sample(rng, static_cast<double>(a), static_cast<double>(n - a + 1));
    if (x >= prob) {
      n = a - 1;
      prob = clamp01(x > 0.0 ? prob / x : 0.0);
    } else {
      base += a;
      n = n - a;
      prob = clamp01((prob - x) / (1.0 - x));
    }
  }
}

std::vector<std::int64_t> multinomial_sample(RngStream& rng, std::int64_t n,
                                             const std::vector<double>& probs) {
  const std::size_t m = probs.size();
  std::vector<std::int64_t> counts(m, 0);
  double ptot = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw ConfigError("multinomial_sample: negative probability");
    ptot += p;
  }
  if (ptot <= 0.0) throw ConfigError("multinomial_sample: probabilities sum to zero");
  std::int64_t rem = n;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    if (rem == 0) break;
    if (probs[j] <= 0.0) continue;
    double cond = clamp01(probs[j] / ptot);
    std::int64_t c = binomial_sample(rng, rem, cond);
    counts[j] = c;
    rem -= c;
    ptot -= probs[j];
    if (ptot <= 0.0) ptot = 0.0;
  }
  if (m > 0) counts[m - 1] += rem;
  return counts;
}

}  // namespace cmbp
