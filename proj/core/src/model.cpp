#include "cmbp/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cmbp/errors.hpp"

namespace cmbp {

namespace {

constexpr double kNegativeEntryTol = 1e-12;
constexpr double kEigenResidualTol = 1e-10;
constexpr double kSignTol = 1e-9;

Vec to_real(const IVec& z) {
  Vec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(z[i]);
  return out;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

ModelMoments compute_derived(const std::vector<DiscreteLaw>& offspring, const Matrix& lambda,
                             const Vec& alpha) {
  const int p = static_cast<int>(offspring.size());
  ModelMoments d;
  d.m = Matrix(p);
  d.sigma.reserve(p);
  d.zeta.reserve(p);
  for (int i = 0; i < p; ++i) {
    MomentSummary ms = moments(offspring[i]);
    for (int l = 0; l < p; ++l) d.m.at(l, i) = ms.mean[l];
    d.sigma.push_back(ms.cov);
    d.zeta.push_back(ms.fourth_central);
  }
  d.m_tilde = d.m * lambda;
  d.m_alpha = d.m * alpha;
  return d;
}

// Clamps float-level negative dust to zero; genuinely negative entries are
// reported by the caller.
Matrix clamp_nonnegative(const Matrix& a) {
  Matrix out = a;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (out.at(i, j) < 0.0) out.at(i, j) = 0.0;
  return out;
}

bool has_negative_entry(const Matrix& a) {
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (a.at(i, j) < -kNegativeEntryTol) return true;
  return false;
}

// Eigen-decomposition route for nonnegative matrices that are not
// primitive: requires a simple real dominant eigenvalue with strictly
// smaller remaining moduli and nonnegative left/right eigenvectors, then
// applies the usual sum-1 / v^T u = 1 normalization.
std::optional<SpectralData> direct_spectral(const Matrix& a, std::string* why) {
  const int p = a.dim();
  if (p > linalg_detail::kCharPolyMaxDim) {
    *why = "matrix is not primitive and is too large for the direct eigenvalue path";
    return std::nullopt;
  }
  auto roots = linalg_detail::eigenvalues_small(a);
  double rho = 0.0;
  for (const auto& r : roots) rho = std::max(rho, std::hypot(r.first, r.second));
  const double tol = 1e-9 * std::max(1.0, rho);
  int dominant_count = 0;
  double second = 0.0;
  bool dominant_real = false;
  for (const auto& r : roots) {
    double mod = std::hypot(r.first, r.second);
    if (mod > rho - tol) {
      ++dominant_count;
      if (std::abs(r.second) <= tol && r.first > 0.0) dominant_real = true;
    } else {
      second = std::max(second, mod);
    }
  }
  if (dominant_count != 1 || !dominant_real) {
    *why = "dominant eigenvalue is not simple real positive";
    return std::nullopt;
  }
  Vec u = linalg_detail::eigenvector_for(a, rho);
  Vec v = linalg_detail::eigenvector_for(a.transposed(), rho);
  for (double& x : u) {
    if (x < -kSignTol) {
      *why = "right eigenvector has negative coordinates";
      return std::nullopt;
    }
    x = std::max(x, 0.0);
  }
  for (double& x : v) {
    if (x < -kSignTol) {
      *why = "left eigenvector has negative coordinates";
      return std::nullopt;
    }
    x = std::max(x, 0.0);
  }
  double su = 0.0;
  for (double x : u) su += x;
  if (su <= 0.0) {
    *why = "right eigenvector is degenerate";
    return std::nullopt;
  }
  for (double& x : u) x /= su;
  double vu = dot(v, u);
  if (std::abs(vu) < 1e-14) {
    *why = "left/right eigenvectors are orthogonal";
    return std::nullopt;
  }
  for (double& x : v) x /= vu;

  // Solver dust (entries at the level of rounding noise relative to the
  // largest coordinate) is snapped to exact zero so that structurally
  // absent types read as 0, not 1e-30.
  auto snap = [](Vec& w) {
    double top = 0.0;
    for (double x : w) top = std::max(top, std::abs(x));
    for (double& x : w)
      if (std::abs(x) < 1e-14 * top) x = 0.0;
  };
  snap(u);
  snap(v);

  Vec au = a * u;
  Vec av = a.left_mul(v);
  double ru = 0.0, rv = 0.0;
  for (int i = 0; i < p; ++i) {
    ru = std::max(ru, std::abs(au[i] - rho * u[i]));
    rv = std::max(rv, std::abs(av[i] - rho * v[i]));
  }
  if (ru > kEigenResidualTol * std::max(1.0, norm2(u)) ||
      rv > kEigenResidualTol * std::max(1.0, norm2(v))) {
    *why = "eigenvector residual too large";
    return std::nullopt;
  }

  SpectralData sd;
  sd.rho = rho;
  sd.u = std::move(u);
  sd.v = std::move(v);
  sd.pi = Matrix::outer(sd.u, sd.v);
  sd.second_modulus = second;
  return sd;
}

}  // namespace

const char* criticality_name(Criticality c) {
  switch (c) {
    case Criticality::Subcritical: return "subcritical";
    case Criticality::Critical: return "critical";
    case Criticality::Supercritical: return "supercritical";
    case Criticality::Indeterminate: return "indeterminate";
  }
  return "?";
}

ModelSpec::ModelSpec(int p, std::vector<DiscreteLaw> offspring, ControlLaw control,
                     Matrix lambda, Vec alpha, DiscreteLaw z0)
    : p_(p),
      offspring_(std::move(offspring)),
      control_(std::move(control)),
      lambda_(std::move(lambda)),
      alpha_(std::move(alpha)),
      z0_(std::move(z0)) {
  if (p_ < 1) throw ConfigError("model: p must be >= 1");
  if (static_cast<int>(offspring_.size()) != p_)
    throw ConfigError("model: need one offspring law per type");
  for (const auto& law : offspring_) {
    if (law.dim() != p_) throw ConfigError("model: offspring law dimension mismatch");
    if (!law.nonnegative()) throw ConfigError("model: offspring laws must be nonnegative");
  }
  if (control_.dim() != p_) throw ConfigError("model: control dimension mismatch");
  if (lambda_.dim() != p_) throw ConfigError("model: lambda dimension mismatch");
  if (!lambda_.all_finite()) throw ConfigError("model: lambda entries must be finite");
  if (static_cast<int>(alpha_.size()) != p_) throw ConfigError("model: alpha dimension mismatch");
  for (double a : alpha_)
    if (!std::isfinite(a)) throw ConfigError("model: alpha entries must be finite");
  if (z0_.dim() != p_) throw ConfigError("model: initial law dimension mismatch");
  if (!z0_.nonnegative()) throw ConfigError("model: initial law must be nonnegative");
  derived_ = compute_derived(offspring_, lambda_, alpha_);
}

Matrix odot(const Vec& z, const std::vector<Matrix>& sigmas) {
  if (z.size() != sigmas.size()) throw ConfigError("odot: dimension mismatch");
  if (sigmas.empty()) throw ConfigError("odot: empty input");
  const int p = sigmas[0].dim();
  Matrix out(p);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (sigmas[i].dim() != p) throw ConfigError("odot: ragged matrix list");
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) out.at(a, b) += z[i] * sigmas[i].at(a, b);
  }
  return out;
}

MomentSummary control_moments(const ModelSpec& model, const IVec& z) {
  return control_moments(model.control(), z);
}

Vec conditional_mean(const ModelSpec& model, const IVec& z) {
  return model.derived().m * control_moments(model, z).mean;
}

Matrix conditional_cov(const ModelSpec& model, const IVec& z) {
  MomentSummary cm = control_moments(model, z);
  const Matrix& m = model.derived().m;
  Matrix mixed = odot(cm.mean, model.derived().sigma);
  Matrix mg = m * cm.cov * m.transposed();
  return mixed + mg;
}

Vec implied_g(const ModelSpec& model, const IVec& z) {
  Vec eps = control_moments(model, z).mean;
  Vec lz = model.lambda() * to_real(z);
  Vec out(model.p());
  for (int i = 0; i < model.p(); ++i) out[i] = eps[i] - lz[i] - model.alpha()[i];
  return out;
}

CriticalityReport classify(const ModelSpec& model, double tolerance_band) {
  CriticalityReport report;
  report.tolerance_band = tolerance_band;
  const Matrix& mt = model.derived().m_tilde;
  if (has_negative_entry(mt)) {
    report.criticality = Criticality::Indeterminate;
    report.note = "m*lambda has negative entries; classification undefined";
    report.rho = spectral_radius(mt);
    return report;
  }
  Matrix a = clamp_nonnegative(mt);
  report.rho = spectral_radius(a);

  std::string why;
  if (is_primitive(a)) {
    report.spectral = perron_frobenius(a);
    // Keep rho and the eigen-solve consistent.
    report.rho = report.spectral->rho;
  } else {
    report.spectral = direct_spectral(a, &why);
    if (report.spectral) report.rho = report.spectral->rho;
  }

  if (std::abs(report.rho - 1.0) <= tolerance_band) {
    if (report.spectral) {
      report.criticality = Criticality::Critical;
    } else {
      report.criticality = Criticality::Indeterminate;
      report.note = "spectral radius is 1 but no valid simple eigenpair: " + why;
    }
  } else if (report.rho < 1.0) {
    report.criticality = Criticality::Subcritical;
    if (!report.spectral) report.note = why;
  } else {
    report.criticality = Criticality::Supercritical;
    if (!report.spectral) report.note = why;
  }
  return report;
}

LimitCoefficients limit_coefficients(const ModelSpec& model) {
  CriticalityReport report = classify(model);
  if (report.criticality != Criticality::Critical)
    throw ConfigError(std::string("limit coefficients require a critical model, got ") +
                      criticality_name(report.criticality) +
                      (report.note.empty() ? "" : " (" + report.note + ")"));
  return limit_coefficients(model, *report.spectral);
}

LimitCoefficients limit_coefficients(const ModelSpec& model, const SpectralData& spectral) {
  const int p = model.p();
  if (static_cast<int>(spectral.u.size()) != p || static_cast<int>(spectral.v.size()) != p)
    throw ConfigError("limit coefficients: eigenvector dimension mismatch");
  double vu = dot(spectral.v, spectral.u);
  if (std::abs(vu - 1.0) > 1e-9)
    throw ConfigError("limit coefficients: eigenvectors must satisfy v^T u = 1");
  const Matrix& mt = model.derived().m_tilde;
  Vec mu = mt * spectral.u;
  for (int i = 0; i < p; ++i)
    if (std::abs(mu[i] - spectral.u[i]) > 1e-8 * std::max(1.0, norm2(spectral.u)))
      throw ConfigError("limit coefficients: u is not a unit eigenvector of m*lambda");

  LimitCoefficients lc;
  lc.direction = spectral.u;
  lc.lambda_u = model.lambda() * spectral.u;
  for (double x : lc.lambda_u) {
    if (x < -kSignTol)
      throw ConfigError("limit coefficients: lambda*u has a negative coordinate");
  }
  for (double& x : lc.lambda_u) x = std::max(x, 0.0);
  lc.drift = dot(spectral.v, model.derived().m_alpha);
  Matrix mixed = odot(lc.lambda_u, model.derived().sigma);
  lc.diffusion = dot(spectral.v, mixed * spectral.v);
  if (lc.diffusion < 0.0) {
    if (lc.diffusion < -1e-10)
      throw NumericError("limit coefficients: negative diffusion");
    lc.diffusion = 0.0;
  }
  return lc;
}

HypothesisReport hypothesis_diagnostics(const ModelSpec& model, const Vec& radii,
                                        int samples_per_radius, RngStream& rng) {
  for (std::size_t r = 1; r < radii.size(); ++r)
    if (radii[r] <= radii[r - 1]) throw ConfigError("hypothesis diagnostics: radii must increase");
  if (samples_per_radius < 1)
    throw ConfigError("hypothesis diagnostics: need at least one sample per radius");

  const int p = model.p();
  HypothesisReport report;
  report.radii = radii;
  for (double radius : radii) {
    double g_max = 0.0, gamma_max = 0.0, kappa_max = 0.0;
    for (int s = 0; s < samples_per_radius; ++s) {
      IVec z(p, 0);
      if (s < p) {
        // Axis states first: they exercise the indicator gates.
        z[s] = std::max<std::int64_t>(1, std::llround(radius));
      } else {
        Vec dir(p);
        double n = 0.0;
        for (int i = 0; i < p; ++i) {
          dir[i] = -std::log(rng.next_unit_pos());
          n += dir[i] * dir[i];
        }
        n = std::sqrt(n);
        bool all_zero = true;
        for (int i = 0; i < p; ++i) {
          z[i] = std::llround(radius * dir[i] / n);
          if (z[i] > 0) all_zero = false;
        }
        if (all_zero) z[s % p] = std::max<std::int64_t>(1, std::llround(radius));
      }
      double zn = norm2(to_real(z));
      MomentSummary cm = control_moments(model, z);
      Vec g = implied_g(model, z);
      g_max = std::max(g_max, norm2(g));
      gamma_max = std::max(gamma_max, linalg_detail::operator_norm2(cm.cov) / zn);
      for (int i = 0; i < p; ++i)
        kappa_max = std::max(kappa_max, cm.fourth_central[i] / (zn * zn));
    }
    report.g_max.push_back(g_max);
    report.gamma_ratio.push_back(gamma_max);
    report.kappa_ratio.push_back(kappa_max);
  }

  const double front_gamma = report.gamma_ratio.front();
  const double back_gamma = report.gamma_ratio.back();
  report.gamma_flagged = back_gamma > 1e-12 && back_gamma >= 0.9 * front_gamma;
  const double front_kappa = report.kappa_ratio.front();
  const double back_kappa = report.kappa_ratio.back();
  report.kappa_flagged = back_kappa > 1e-12 && back_kappa > 1.15 * front_kappa;
  return report;
}

}  // namespace cmbp
