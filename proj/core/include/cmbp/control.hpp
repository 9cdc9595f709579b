#pragma once

#include <map>
#include <utility>
#include <vector>

#include "cmbp/laws.hpp"
#include "cmbp/matrix.hpp"
#include "cmbp/rng.hpp"

namespace cmbp {

// Control mechanism: given the current population vector z, the control
// draw phi(z) decides how many progenitors of each type reproduce this
// generation. Deterministic kinds (identity, affine, append_unit, the two
// mating functions) have zero control variance; migration, immigration and
// table kinds are genuinely random.
class ControlLaw {
 public:
  enum class Kind {
    Identity,            // phi(z) = z
    AffineDeterministic, // phi(z) = Cz + d, integer-valued by construction
    AppendUnit,          // phi(z) = (z_1..z_{p-1}, 1)
    Migration,           // phi_i(z) = z_i + M_i when z_i > 0, else 0
    Immigration,         // phi(z) = z + I with I >= 0 (joint law)
    MatingPromiscuous,   // phi(z) = (z_1 * min(1, z_2), 1)
    MatingSelffert,      // phi(z) = (z_1 + z_2, 1)
    Table,               // explicit z -> law map on a finite grid
  };

  // What a Table control does off its grid.
  enum class Fallback { Error, Identity };

  static ControlLaw identity(int p);
  // Output must be a nonnegative integer vector for every nonnegative
  // integer input; entries of coeff/offset are checked to be integral and
  // the output is validated on a small sample grid. `origin_override`, when
  // given, replaces phi(0) (used by models whose affine map would go
  // negative at the origin only).
  static ControlLaw affine_deterministic(Matrix coeff, Vec offset);
  static ControlLaw affine_deterministic(Matrix coeff, Vec offset, IVec origin_override);
  static ControlLaw append_unit(int p);
  // One signed scalar law per coordinate; support must lie in {-1, 0, 1, ...}
  // so that z_i + M_i stays nonnegative whenever z_i > 0.
  static ControlLaw migration(std::vector<DiscreteLaw> laws);
  static ControlLaw immigration(DiscreteLaw law);
  static ControlLaw mating_promiscuous();
  static ControlLaw mating_selffert();
  static ControlLaw table(std::vector<std::pair<IVec, DiscreteLaw>> entries, Fallback fallback);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  const Matrix& coeff() const { return coeff_; }
  const Vec& offset() const { return offset_; }
  bool has_origin_override() const { return has_origin_override_; }
  const IVec& origin_override() const { return origin_override_; }
  const std::vector<DiscreteLaw>& migration_laws() const { return laws_; }
  const DiscreteLaw& immigration_law() const { return laws_[0]; }
  const std::map<IVec, DiscreteLaw>& entries() const { return grid_; }
  Fallback fallback() const { return fallback_; }

 private:
  ControlLaw() = default;

  Kind kind_ = Kind::Identity;
  int dim_ = 0;
  Matrix coeff_;
  Vec offset_;
  bool has_origin_override_ = false;
  IVec origin_override_;
  std::vector<DiscreteLaw> laws_;  // Migration (per coordinate) / Immigration (single joint)
  std::map<IVec, DiscreteLaw> grid_;
  Fallback fallback_ = Fallback::Error;
};

// One control draw phi(z).
IVec sample_control(const ControlLaw& control, const IVec& z, RngStream& rng);

// Analytic control moments at state z: mean = eps(z), cov = Gamma(z),
// fourth_central = kappa(z) per coordinate.
MomentSummary control_moments(const ControlLaw& control, const IVec& z);

const char* control_kind_name(ControlLaw::Kind k);

}  // namespace cmbp
