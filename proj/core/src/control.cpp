#include "cmbp/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmbp/errors.hpp"

namespace cmbp {

namespace {

constexpr double kIntegerTol = 1e-9;
constexpr std::int64_t kAffineGridMax = 4;

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError(what);
  return r;
}

bool is_zero(const IVec& z) {
  return std::all_of(z.begin(), z.end(), [](std::int64_t v) { return v == 0; });
}

// phi(z) = Cz + d evaluated in doubles; rejects non-integer or negative output.
IVec affine_apply(const Matrix& coeff, const Vec& offset, const IVec& z) {
  const int p = static_cast<int>(offset.size());
  IVec out(p);
  for (int i = 0; i < p; ++i) {
    double acc = offset[i];
    for (int l = 0; l < p; ++l) acc += coeff.at(i, l) * static_cast<double>(z[l]);
    double rounded = std::round(acc);
    if (std::abs(acc - rounded) > kIntegerTol)
      throw NumericError("affine control produced a non-integer count");
    if (rounded < 0.0)
      throw NumericError("affine control produced a negative count");
    out[i] = static_cast<std::int64_t>(rounded);
  }
  return out;
}

void check_integral_entries(const Matrix& coeff, const Vec& offset) {
  for (int i = 0; i < coeff.dim(); ++i)
    for (int j = 0; j < coeff.dim(); ++j)
      if (std::abs(coeff.at(i, j) - std::round(coeff.at(i, j))) > kIntegerTol)
        throw ConfigError("affine control: matrix entries must be integers");
  for (double d : offset)
    if (std::abs(d - std::round(d)) > kIntegerTol)
      throw ConfigError("affine control: offset entries must be integers");
}

// Walks a small grid of states and rejects constructions whose output
// leaves Z_+^p. This cannot prove global validity; it catches the common
// sign mistakes at build time.
void check_affine_on_grid(const Matrix& coeff, const Vec& offset, bool has_override) {
  const int p = static_cast<int>(offset.size());
  IVec z(p, 0);
  while (true) {
    if (!(has_override && is_zero(z))) {
      try {
        affine_apply(coeff, offset, z);
      } catch (const NumericError& e) {
        throw ConfigError(std::string("affine control invalid on sample grid: ") + e.what());
      }
    }
    int i = 0;
    for (; i < p; ++i) {
      if (z[i] < kAffineGridMax) {
        ++z[i];
        break;
      }
      z[i] = 0;
    }
    if (i == p) break;
  }
}

}  // namespace

const char* control_kind_name(ControlLaw::Kind k) {
  switch (k) {
    case ControlLaw::Kind::Identity: return "identity";
    case ControlLaw::Kind::AffineDeterministic: return "affine_deterministic";
    case ControlLaw::Kind::AppendUnit: return "append_unit";
    case ControlLaw::Kind::Migration: return "migration";
    case ControlLaw::Kind::Immigration: return "immigration";
    case ControlLaw::Kind::MatingPromiscuous: return "mating_promiscuous";
    case ControlLaw::Kind::MatingSelffert: return "mating_selffert";
    case ControlLaw::Kind::Table: return "table";
  }
  return "?";
}

ControlLaw ControlLaw::identity(int p) {
  if (p < 1) throw ConfigError("identity control: dimension must be >= 1");
  ControlLaw c;
  c.kind_ = Kind::Identity;
  c.dim_ = p;
  return c;
}

ControlLaw ControlLaw::affine_deterministic(Matrix coeff, Vec offset) {
  if (coeff.dim() != static_cast<int>(offset.size()))
    throw ConfigError("affine control: matrix/offset dimension mismatch");
  check_integral_entries(coeff, offset);
  check_affine_on_grid(coeff, offset, false);
  ControlLaw c;
  c.kind_ = Kind::AffineDeterministic;
  c.dim_ = coeff.dim();
  c.coeff_ = std::move(coeff);
  c.offset_ = std::move(offset);
  return c;
}

ControlLaw ControlLaw::affine_deterministic(Matrix coeff, Vec offset, IVec origin_override) {
  if (coeff.dim() != static_cast<int>(offset.size()) ||
      offset.size() != origin_override.size())
    throw ConfigError("affine control: dimension mismatch");
  for (std::int64_t v : origin_override)
    if (v < 0) throw ConfigError("affine control: origin override must be nonnegative");
  check_integral_entries(coeff, offset);
  check_affine_on_grid(coeff, offset, true);
  ControlLaw c;
  c.kind_ = Kind::AffineDeterministic;
  c.dim_ = coeff.dim();
  c.coeff_ = std::move(coeff);
  c.offset_ = std::move(offset);
  c.has_origin_override_ = true;
  c.origin_override_ = std::move(origin_override);
  return c;
}

ControlLaw ControlLaw::append_unit(int p) {
  if (p < 2) throw ConfigError("append_unit control: dimension must be >= 2");
  ControlLaw c;
  c.kind_ = Kind::AppendUnit;
  c.dim_ = p;
  return c;
}

ControlLaw ControlLaw::migration(std::vector<DiscreteLaw> laws) {
  if (laws.empty()) throw ConfigError("migration control: no per-coordinate laws");
  for (const auto& law : laws) {
    if (law.dim() != 1) throw ConfigError("migration control: laws must be scalar");
    if (law.min_coordinate(0) < -1)
      throw ConfigError("migration control: support must lie in {-1, 0, 1, ...}");
  }
  ControlLaw c;
  c.kind_ = Kind::Migration;
  c.dim_ = static_cast<int>(laws.size());
  c.laws_ = std::move(laws);
  return c;
}

ControlLaw ControlLaw::immigration(DiscreteLaw law) {
  if (!law.nonnegative())
    throw ConfigError("immigration control: law must be nonnegative");
  ControlLaw c;
  c.kind_ = Kind::Immigration;
  c.dim_ = law.dim();
  c.laws_.push_back(std::move(law));
  return c;
}

ControlLaw ControlLaw::mating_promiscuous() {
  ControlLaw c;
  c.kind_ = Kind::MatingPromiscuous;
  c.dim_ = 2;
  return c;
}

ControlLaw ControlLaw::mating_selffert() {
  ControlLaw c;
  c.kind_ = Kind::MatingSelffert;
  c.dim_ = 2;
  return c;
}

ControlLaw ControlLaw::table(std::vector<std::pair<IVec, DiscreteLaw>> entries,
                             Fallback fallback) {
  if (entries.empty()) throw ConfigError("table control: empty grid");
  const int p = static_cast<int>(entries[0].first.size());
  ControlLaw c;
  c.kind_ = Kind::Table;
  c.dim_ = p;
  c.fallback_ = fallback;
  for (auto& [z, law] : entries) {
    if (static_cast<int>(z.size()) != p || law.dim() != p)
      throw ConfigError("table control: grid entry dimension mismatch");
    if (!law.nonnegative())
      throw ConfigError("table control: grid laws must be nonnegative");
    if (!c.grid_.emplace(std::move(z), std::move(law)).second)
      throw ConfigError("table control: duplicate grid state");
  }
  return c;
}

IVec sample_control(const ControlLaw& control, const IVec& z, RngStream& rng) {
  if (static_cast<int>(z.size()) != control.dim())
    throw ConfigError("sample_control: state dimension mismatch");
  switch (control.kind()) {
    case ControlLaw::Kind::Identity:
      return z;
    case ControlLaw::Kind::AffineDeterministic:
      if (control.has_origin_override() && is_zero(z)) return control.origin_override();
      return affine_apply(control.coeff(), control.offset(), z);
    case ControlLaw::Kind::AppendUnit: {
      IVec out = z;
      out.back() = 1;
      return out;
    }
    case ControlLaw::Kind::Migration: {
      IVec out = z;
      for (int i = 0; i < control.dim(); ++i) {
        if (z[i] <= 0) {
          out[i] = 0;
          continue;
        }
        std::int64_t mig = sample(control.migration_laws()[i], rng)[0];
        out[i] = checked_add(z[i], mig, "migration moved a count out of 64-bit range");
        if (out[i] < 0) throw NumericError("migration drove a coordinate negative");
      }
      return out;
    }
    case ControlLaw::Kind::Immigration: {
      IVec inc = sample(control.immigration_law(), rng);
      IVec out = z;
      for (int i = 0; i < control.dim(); ++i)
        out[i] = checked_add(out[i], inc[i], "immigration moved a count out of 64-bit range");
      return out;
    }
    case ControlLaw::Kind::MatingPromiscuous:
      return IVec{z[1] >= 1 ? z[0] : 0, 1};
    case ControlLaw::Kind::MatingSelffert:
      return IVec{checked_add(z[0], z[1], "mating unit count out of 64-bit range"), 1};
    case ControlLaw::Kind::Table: {
      auto it = control.entries().find(z);
      if (it != control.entries().end()) return sample(it->second, rng);
      if (control.fallback() == ControlLaw::Fallback::Identity) return z;
      throw ConfigError("table control: state off the grid with fallback=error");
    }
  }
  throw ConfigError("sample_control: unknown control kind");
}

MomentSummary control_moments(const ControlLaw& control, const IVec& z) {
  if (static_cast<int>(z.size()) != control.dim())
    throw ConfigError("control_moments: state dimension mismatch");
  const int p = control.dim();
  MomentSummary ms;
  ms.mean.assign(p, 0.0);
  ms.cov = Matrix(p);
  ms.fourth_central.assign(p, 0.0);
  switch (control.kind()) {
    case ControlLaw::Kind::Identity:
      for (int i = 0; i < p; ++i) ms.mean[i] = static_cast<double>(z[i]);
      return ms;
    case ControlLaw::Kind::AffineDeterministic: {
      IVec phi = control.has_origin_override() && is_zero(z)
                     ? control.origin_override()
                     : affine_apply(control.coeff(), control.offset(), z);
      for (int i = 0; i < p; ++i) ms.mean[i] = static_cast<double>(phi[i]);
      return ms;
    }
    case ControlLaw::Kind::AppendUnit:
      for (int i = 0; i + 1 < p; ++i) ms.mean[i] = static_cast<double>(z[i]);
      ms.mean[p - 1] = 1.0;
      return ms;
    case ControlLaw::Kind::Migration:
      for (int i = 0; i < p; ++i) {
        if (z[i] <= 0) continue;
        MomentSummary mi = moments(control.migration_laws()[i]);
        ms.mean[i] = static_cast<double>(z[i]) + mi.mean[0];
        ms.cov.at(i, i) = mi.cov.at(0, 0);
        ms.fourth_central[i] = mi.fourth_central[0];
      }
      return ms;
    case ControlLaw::Kind::Immigration: {
      MomentSummary mi = moments(control.immigration_law());
      for (int i = 0; i < p; ++i) ms.mean[i] = static_cast<double>(z[i]) + mi.mean[i];
      ms.cov = mi.cov;
      ms.fourth_central = mi.fourth_central;
      return ms;
    }
    case ControlLaw::Kind::MatingPromiscuous:
      ms.mean[0] = z[1] >= 1 ? static_cast<double>(z[0]) : 0.0;
      ms.mean[1] = 1.0;
      return ms;
    case ControlLaw::Kind::MatingSelffert:
      ms.mean[0] = static_cast<double>(z[0]) + static_cast<double>(z[1]);
      ms.mean[1] = 1.0;
      return ms;
    case ControlLaw::Kind::Table: {
      auto it = control.entries().find(z);
      if (it != control.entries().end()) return moments(it->second);
      if (control.fallback() == ControlLaw::Fallback::Identity) {
        for (int i = 0; i < p; ++i) ms.mean[i] = static_cast<double>(z[i]);
        return ms;
      }
      throw ConfigError("table control: state off the grid with fallback=error");
    }
  }
  throw ConfigError("control_moments: unknown control kind");
}

}  // namespace cmbp
