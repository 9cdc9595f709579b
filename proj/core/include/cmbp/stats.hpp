#pragma once

namespace cmbp {

// Regularized lower incomplete gamma P(a, x); series for x < a+1,
// continued fraction otherwise. Relative accuracy ~1e-13.
double gamma_p(double a, double x);

// CDF of Gamma(shape, rate) at x.
double gamma_cdf(double shape, double rate, double x);

// Survival function Q(lambda) of the Kolmogorov distribution,
// Q(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2), with the
// theta-dual form below lambda ~ 1.18 for accuracy. Series truncated at
// relative 1e-10.
double kolmogorov_sf(double lambda);

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace cmbp
