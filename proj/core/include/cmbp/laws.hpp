#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cmbp/matrix.hpp"
#include "cmbp/rng.hpp"

namespace cmbp {

using IVec = std::vector<std::int64_t>;

// First, second and fourth moments of a multivariate law. Also reused for
// control moments, where mean/cov/fourth_central play the roles of
// eps(z), Gamma(z) and kappa(z).
struct MomentSummary {
  Vec mean;
  Matrix cov;
  Vec fourth_central;  // per coordinate, E[(X_l - mean_l)^4]
};

// Discrete multivariate law on integer vectors. Offspring laws live on
// Z_+^p; migration laws may be signed. Immutable after construction.
class DiscreteLaw {
 public:
  enum class Kind {
    Deterministic,    // a single point
    Table,            // finite support with probabilities
    Poisson,          // independent Poisson coordinates
    BernoulliVector,  // `point` w.p. q, zero vector w.p. 1-q
    Product,          // independent scalar component laws
    Shifted,          // base law plus integer offset
  };

  static DiscreteLaw deterministic(IVec point);
  static DiscreteLaw table(std::vector<IVec> support, Vec probs);
  static DiscreteLaw poisson(Vec rates);
  static DiscreteLaw bernoulli_vector(IVec point, double q);
  static DiscreteLaw product(std::vector<DiscreteLaw> components);
  static DiscreteLaw shifted(DiscreteLaw base, IVec offset);

  // Scalar conveniences.
  static DiscreteLaw deterministic1(std::int64_t v) { return deterministic(IVec{v}); }
  static DiscreteLaw poisson1(double rate) { return poisson(Vec{rate}); }
  static DiscreteLaw table1(const std::vector<std::int64_t>& vals, Vec probs);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  const IVec& point() const { return point_; }
  const std::vector<IVec>& support() const { return support_; }
  const Vec& probs() const { return probs_; }
  const Vec& rates() const { return rates_; }
  double q() const { return q_; }
  const std::vector<DiscreteLaw>& components() const { return components_; }
  const DiscreteLaw& base() const { return components_[0]; }
  const IVec& offset() const { return point_; }

  // Exact lower bound of coordinate `l` over the support.
  std::int64_t min_coordinate(int l) const;
  bool nonnegative() const;

  // Table laws only: index of the first row whose cumulative probability
  // exceeds `u`, for u in [0,1).
  std::size_t table_row(double u) const;

  // New law on dim()+1 coordinates with a deterministic 0 appended.
  DiscreteLaw with_zero_appended() const;

 private:
  DiscreteLaw() = default;

  Kind kind_ = Kind::Deterministic;
  int dim_ = 0;
  IVec point_;                  // Deterministic point / Shifted offset
  std::vector<IVec> support_;   // Table
  Vec probs_;                   // Table
  Vec cum_;                     // Table, cumulative probabilities (derived)
  Vec rates_;                   // Poisson
  double q_ = 0.0;              // BernoulliVector
  std::vector<DiscreteLaw> components_;  // Product components / Shifted base
};

// One draw from the law.
IVec sample(const DiscreteLaw& law, RngStream& rng);

// Distribution-exact draw of the sum of `count` i.i.d. copies. Uses
// law-specific aggregation (Poisson additivity, multinomial table counts,
// binomial for Bernoulli vectors) above a small cutoff; `force_naive`
// keeps the term-by-term summation for differential testing.
IVec sample_iid_sum(const DiscreteLaw& law, std::int64_t count, RngStream& rng,
                    bool force_naive = false);

// Exact analytic moments.
MomentSummary moments(const DiscreteLaw& law);

// E[(sum_{i=1}^B A_i)^4] for i.i.d. zero-mean A with variance sigma2_A and
// fourth moment zeta_A, independent of the Z_+-valued count B with mean
// mu_B and variance gamma_B:
//   3 sigma2_A^2 (gamma_B + mu_B^2) + (zeta_A - 3 sigma2_A^2) mu_B
double fourth_moment_random_sum(double sigma2_A, double zeta_A, double mu_B, double gamma_B);

const char* law_kind_name(DiscreteLaw::Kind k);

}  // namespace cmbp
