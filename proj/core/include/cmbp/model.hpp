#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmbp/control.hpp"
#include "cmbp/laws.hpp"
#include "cmbp/matrix.hpp"
#include "cmbp/rng.hpp"

namespace cmbp {

// Per-type offspring moments plus the products that every downstream
// computation needs. Columns of `m` are the per-type offspring means.
struct ModelMoments {
  Matrix m;                   // m(l, i) = mean offspring of type l from a type-i progenitor
  Matrix m_tilde;             // m * lambda
  std::vector<Matrix> sigma;  // per-type offspring covariance
  std::vector<Vec> zeta;      // per-type fourth central offspring moments (per coordinate)
  Vec m_alpha;                // m * alpha
};

// Complete description of a controlled branching model: offspring law per
// type, the control mechanism, the declared affine decomposition (lambda,
// alpha) of the control mean, and the initial law. Immutable once built.
class ModelSpec {
 public:
  ModelSpec(int p, std::vector<DiscreteLaw> offspring, ControlLaw control, Matrix lambda,
            Vec alpha, DiscreteLaw z0);

  int p() const { return p_; }
  const std::vector<DiscreteLaw>& offspring() const { return offspring_; }
  const ControlLaw& control() const { return control_; }
  const Matrix& lambda() const { return lambda_; }
  const Vec& alpha() const { return alpha_; }
  const DiscreteLaw& z0() const { return z0_; }
  const ModelMoments& derived() const { return derived_; }

  // When set, i.i.d. offspring sums are drawn term by term instead of via
  // the law-specific aggregate samplers; used for differential testing.
  bool force_naive_sums = false;
  // The theory additionally assumes the process cannot blow up while the
  // control stays on bounded levels. This is a declared property of the
  // model, recorded but not checkable numerically.
  bool assumes_no_explosion = true;

 private:
  int p_;
  std::vector<DiscreteLaw> offspring_;
  ControlLaw control_;
  Matrix lambda_;
  Vec alpha_;
  DiscreteLaw z0_;
  ModelMoments derived_;
};

enum class Criticality { Subcritical, Critical, Supercritical, Indeterminate };
const char* criticality_name(Criticality c);

struct CriticalityReport {
  double rho = 0.0;
  Criticality criticality = Criticality::Indeterminate;
  std::optional<SpectralData> spectral;
  double tolerance_band = 0.0;
  std::string note;  // non-empty when spectral data is absent or degenerate
};

struct LimitCoefficients {
  double drift = 0.0;      // v^T m alpha
  double diffusion = 0.0;  // v^T ((lambda u) . Sigma) v
  Vec direction;           // u
  Vec lambda_u;            // lambda * u, must be nonnegative
};

struct HypothesisReport {
  Vec radii;
  Vec g_max;        // per shell, max ||eps(z) - lambda z - alpha||
  Vec gamma_ratio;  // per shell, max ||Gamma(z)|| / ||z||
  Vec kappa_ratio;  // per shell, max_i kappa_i(z) / ||z||^2
  bool gamma_flagged = false;  // ratio failed to decay across shells
  bool kappa_flagged = false;  // ratio grew across shells
};

// Mixes per-type covariance matrices: sum_i z_i * sigmas[i].
Matrix odot(const Vec& z, const std::vector<Matrix>& sigmas);

// Control moments at state z (mean eps(z), cov Gamma(z), fourth kappa(z)).
MomentSummary control_moments(const ModelSpec& model, const IVec& z);

// E[Z_k | Z_{k-1} = z] = m eps(z).
Vec conditional_mean(const ModelSpec& model, const IVec& z);

// Var[Z_k | Z_{k-1} = z] = eps(z) . Sigma + m Gamma(z) m^T.
Matrix conditional_cov(const ModelSpec& model, const IVec& z);

// Residual of the declared affine decomposition: eps(z) - lambda z - alpha.
Vec implied_g(const ModelSpec& model, const IVec& z);

// Classifies the model by the spectral radius of m_tilde = m * lambda.
// Within the tolerance band of 1 the class is Critical, provided the
// dominant eigenvalue is simple with strictly smaller remaining moduli
// (checked via primitivity or, failing that, a direct eigenvalue path);
// otherwise Indeterminate with a diagnostic note.
CriticalityReport classify(const ModelSpec& model, double tolerance_band = 1e-9);

// Scalar limit coefficients of a critical model. The second overload
// accepts externally supplied spectral data (only v^T u = 1 and the
// eigen-residuals are required, enabling renormalization experiments).
LimitCoefficients limit_coefficients(const ModelSpec& model);
LimitCoefficients limit_coefficients(const ModelSpec& model, const SpectralData& spectral);

// Heuristic growth diagnostics for the control moments: samples states on
// shells of the given radii and reports the observed envelopes of g, of
// ||Gamma(z)||/||z|| and of kappa_i(z)/||z||^2. Flags are raised when the
// ratios fail to decay (Gamma) or grow (kappa) across shells; they are
// indicative, not conclusive.
HypothesisReport hypothesis_diagnostics(const ModelSpec& model, const Vec& radii,
                                        int samples_per_radius, RngStream& rng);

}  // namespace cmbp
