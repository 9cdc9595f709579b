#pragma once

#include <cstdint>
#include <vector>

#include "cmbp/rng.hpp"

namespace cmbp {

// Exact discrete samplers built on RngStream. These are deliberately
// hand-rolled: the standard library's distribution algorithms are
// implementation-defined, which would break the bit-reproducibility
// contract across toolchain updates.

// Poisson(rate). Inversion below rate 10, PTRS transformed rejection above.
std::int64_t poisson_sample(RngStream& rng, double rate);

// Binomial(n, prob) for any 0 <= n <= 2^63-1.
// Bernoulli summation for small n, geometric waiting-time for small n*p,
// and an order-statistic beta split (exact) to reduce large n.
std::int64_t binomial_sample(RngStream& rng, std::int64_t n, double prob);

// Gamma(shape, 1) by Marsaglia-Tsang squeeze (with the usual alpha < 1 boost).
double gamma_sample(RngStream& rng, double shape);

// Multinomial(n; probs) counts via sequential conditional binomials.
std::vector<std::int64_t> multinomial_sample(RngStream& rng, std::int64_t n,
                                             const std::vector<double>& probs);

}  // namespace cmbp
