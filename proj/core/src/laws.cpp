#include "cmbp/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cmbp/errors.hpp"
#include "cmbp/sampling.hpp"

namespace cmbp {

namespace {

constexpr std::int64_t kNaiveSumCutoff = 16;
constexpr double kProbTol = 1e-12;

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError(what);
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError(what);
  return r;
}

void add_into(IVec& acc, const IVec& x) {
  for (std::size_t l = 0; l < acc.size(); ++l)
    acc[l] = checked_add(acc[l], x[l], "population sum exceeds 64-bit range");
}

}  // namespace

const char* law_kind_name(DiscreteLaw::Kind k) {
  switch (k) {
    case DiscreteLaw::Kind::Deterministic: return "deterministic";
    case DiscreteLaw::Kind::Table: return "table";
    case DiscreteLaw::Kind::Poisson: return "poisson";
    case DiscreteLaw::Kind::BernoulliVector: return "bernoulli_vector";
    case DiscreteLaw::Kind::Product: return "product";
    case DiscreteLaw::Kind::Shifted: return "shifted";
  }
  return "?";
}

DiscreteLaw DiscreteLaw::deterministic(IVec point) {
  if (point.empty()) throw ConfigError("deterministic law: empty point");
  DiscreteLaw law;
  law.kind_ = Kind::Deterministic;
  law.dim_ = static_cast<int>(point.size());
  law.point_ = std::move(point);
  return law;
}

DiscreteLaw DiscreteLaw::table(std::vector<IVec> support, Vec probs) {
  if (support.empty() || support.size() != probs.size())
    throw ConfigError("table law: support/probs size mismatch or empty");
  const int d = static_cast<int>(support[0].size());
  if (d < 1) throw ConfigError("table law: empty support vector");
  double tot = 0.0;
  for (std::size_t r = 0; r < support.size(); ++r) {
    if (static_cast<int>(support[r].size()) != d) throw ConfigError("table law: ragged support");
    if (probs[r] < 0.0) throw ConfigError("table law: negative probability");
    tot += probs[r];
  }
  if (std::abs(tot - 1.0) > kProbTol) throw ConfigError("table law: probabilities must sum to 1");
  DiscreteLaw law;
  law.kind_ = Kind::Table;
  law.dim_ = d;
  law.support_ = std::move(support);
  law.probs_ = std::move(probs);
  law.cum_.resize(law.probs_.size());
  double c = 0.0;
  for (std::size_t r = 0; r < law.probs_.size(); ++r) {
    c += law.probs_[r];
    law.cum_[r] = c;
  }
  law.cum_.back() = 1.0;
  return law;
}

DiscreteLaw DiscreteLaw::table1(const std::vector<std::int64_t>& vals, Vec probs) {
  std::vector<IVec> sup;
  sup.reserve(vals.size());
  for (auto v : vals) sup.push_back(IVec{v});
  return table(std::move(sup), std::move(probs));
}

DiscreteLaw DiscreteLaw::poisson(Vec rates) {
  if (rates.empty()) throw ConfigError("poisson law: no rates");
  for (double r : rates)
    if (r < 0.0 || !std::isfinite(r)) throw ConfigError("poisson law: rates must be finite and >= 0");
  DiscreteLaw law;
  law.kind_ = Kind::Poisson;
  law.dim_ = static_cast<int>(rates.size());
  law.rates_ = std::move(rates);
  return law;
}

DiscreteLaw DiscreteLaw::bernoulli_vector(IVec point, double q) {
  if (point.empty()) throw ConfigError("bernoulli_vector law: empty point");
  if (q < 0.0 || q > 1.0) throw ConfigError("bernoulli_vector law: q outside [0,1]");
  DiscreteLaw law;
  law.kind_ = Kind::BernoulliVector;
  law.dim_ = static_cast<int>(point.size());
  law.point_ = std::move(point);
  law.q_ = q;
  return law;
}

DiscreteLaw DiscreteLaw::product(std::vector<DiscreteLaw> components) {
  if (components.empty()) throw ConfigError("product law: no components");
  for (const auto& c : components)
    if (c.dim() != 1) throw ConfigError("product law: components must be scalar laws");
  DiscreteLaw law;
  law.kind_ = Kind::Product;
  law.dim_ = static_cast<int>(components.size());
  law.components_ = std::move(components);
  return law;
}

DiscreteLaw DiscreteLaw::shifted(DiscreteLaw base, IVec offset) {
  if (static_cast<int>(offset.size()) != base.dim())
    throw ConfigError("shifted law: offset dimension mismatch");
  DiscreteLaw law;
  law.kind_ = Kind::Shifted;
  law.dim_ = base.dim();
  law.point_ = std::move(offset);
  law.components_.push_back(std::move(base));
  return law;
}

std::size_t DiscreteLaw::table_row(double u) const {
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  return static_cast<std::size_t>(it - cum_.begin());
}

std::int64_t DiscreteLaw::min_coordinate(int l) const {
  switch (kind_) {
    case Kind::Deterministic:
      return point_[l];
    case Kind::Table: {
      std::int64_t m = std::numeric_limits<std::int64_t>::max();
      for (std::size_t r = 0; r < support_.size(); ++r)
        if (probs_[r] > 0.0) m = std::min(m, support_[r][l]);
      return m;
    }
    case Kind::Poisson:
      return 0;
    case Kind::BernoulliVector:
      if (q_ >= 1.0) return point_[l];
      if (q_ <= 0.0) return 0;
      return std::min<std::int64_t>(0, point_[l]);
    case Kind::Product:
      return components_[l].min_coordinate(0);
    case Kind::Shifted:
      return checked_add(components_[0].min_coordinate(l), point_[l], "shifted law support bound overflow");
  }
  return 0;
}

bool DiscreteLaw::nonnegative() const {
  for (int l = 0; l < dim_; ++l)
    if (min_coordinate(l) < 0) return false;
  return true;
}

DiscreteLaw DiscreteLaw::with_zero_appended() const {
  switch (kind_) {
    case Kind::Deterministic: {
      IVec p = point_;
      p.push_back(0);
      return deterministic(std::move(p));
    }
    case Kind::Table: {
      std::vector<IVec> sup = support_;
      for (auto& row : sup) row.push_back(0);
      return table(std::move(sup), probs_);
    }
    case Kind::Poisson: {
      Vec r = rates_;
      r.push_back(0.0);  // Poisson(0) is identically 0
      return poisson(std::move(r));
    }
    case Kind::BernoulliVector: {
      IVec p = point_;
      p.push_back(0);
      return bernoulli_vector(std::move(p), q_);
    }
    case Kind::Product: {
      std::vector<DiscreteLaw> comps = components_;
      comps.push_back(deterministic1(0));
      return product(std::move(comps));
    }
    case Kind::Shifted: {
      IVec off = point_;
      off.push_back(0);
      return shifted(components_[0].with_zero_appended(), std::move(off));
    }
  }
  throw ConfigError("with_zero_appended: unknown kind");
}

IVec sample(const DiscreteLaw& law, RngStream& rng) {
  switch (law.kind()) {
    case DiscreteLaw::Kind::Deterministic:
      return law.point();
    case DiscreteLaw::Kind::Table:
      return law.support()[law.table_row(rng.next_unit())];
    case DiscreteLaw::Kind::Poisson: {
      IVec out(law.dim());
      for (int l = 0; l < law.dim(); ++l) out[l] = poisson_sample(rng, law.rates()[l]);
      return out;
    }
    case DiscreteLaw::Kind::BernoulliVector:
      if (rng.next_unit() < law.q()) return law.point();
      return IVec(law.dim(), 0);
    case DiscreteLaw::Kind::Product: {
      IVec out(law.dim());
      for (int l = 0; l < law.dim(); ++l) out[l] = sample(law.components()[l], rng)[0];
      return out;
    }
    case DiscreteLaw::Kind::Shifted: {
      IVec out = sample(law.base(), rng);
      for (int l = 0; l < law.dim(); ++l)
        out[l] = checked_add(out[l], law.offset()[l], "shifted law sample overflow");
      return out;
    }
  }
  throw ConfigError("sample: unknown law kind");
}

IVec sample_iid_sum(const DiscreteLaw& law, std::int64_t count, RngStream& rng, bool force_naive) {
  if (count < 0) throw ConfigError("sample_iid_sum: negative count");
  if (count == 0) return IVec(law.dim(), 0);
  if (force_naive || count <= kNaiveSumCutoff) {
    IVec acc(law.dim(), 0);
    for (std::int64_t j = 0; j < count; ++j) add_into(acc, sample(law, rng));
    return acc;
  }
  switch (law.kind()) {
    case DiscreteLaw::Kind::Deterministic: {
      IVec out(law.dim());
      for (int l = 0; l < law.dim(); ++l)
        out[l] = checked_mul(law.point()[l], count, "population sum exceeds 64-bit range");
      return out;
    }
    case DiscreteLaw::Kind::Poisson: {
      IVec out(law.dim());
      for (int l = 0; l < law.dim(); ++l)
        out[l] = poisson_sample(rng, law.rates()[l] * static_cast<double>(count));
      return out;
    }
    case DiscreteLaw::Kind::Table: {
      auto counts = multinomial_sample(rng, count, law.probs());
      IVec acc(law.dim(), 0);
      for (std::size_t r = 0; r < counts.size(); ++r) {
        if (counts[r] == 0) continue;
        for (int l = 0; l < law.dim(); ++l) {
          std::int64_t contrib =
              checked_mul(law.support()[r][l], counts[r], "population sum exceeds 64-bit range");
          acc[l] = checked_add(acc[l], contrib, "population sum exceeds 64-bit range");
        }
      }
      return acc;
    }
    case DiscreteLaw::Kind::BernoulliVector: {
      std::int64_t k = binomial_sample(rng, count, law.q());
      IVec out(law.dim());
      for (int l = 0; l < law.dim(); ++l)
        out[l] = checked_mul(law.point()[l], k, "population sum exceeds 64-bit range");
      return out;
    }
    case DiscreteLaw::Kind::Product: {
      IVec out(law.dim());
      for (int l = 0; l < law.dim(); ++l)
        out[l] = sample_iid_sum(law.components()[l], count, rng, false)[0];
      return out;
    }
    case DiscreteLaw::Kind::Shifted: {
      IVec out = sample_iid_sum(law.base(), count, rng, false);
      for (int l = 0; l < law.dim(); ++l) {
        std::int64_t shift = checked_mul(law.offset()[l], count, "population sum exceeds 64-bit range");
        out[l] = checked_add(out[l], shift, "population sum exceeds 64-bit range");
      }
      return out;
    }
  }
  throw ConfigError("sample_iid_sum: unknown law kind");
}

MomentSummary moments(const DiscreteLaw& law) {
  const int d = law.dim();
  MomentSummary ms;
  ms.mean.assign(d, 0.0);
  ms.cov = Matrix(d);
  ms.fourth_central.assign(d, 0.0);
  switch (law.kind()) {
    case DiscreteLaw::Kind::Deterministic:
      for (int l = 0; l < d; ++l) ms.mean[l] = static_cast<double>(law.point()[l]);
      return ms;
    case DiscreteLaw::Kind::Table: {
      const auto& sup = law.support();
      const auto& pr = law.probs();
      for (std::size_t r = 0; r < sup.size(); ++r)
        for (int l = 0; l < d; ++l) ms.mean[l] += pr[r] * static_cast<double>(sup[r][l]);
      for (std::size_t r = 0; r < sup.size(); ++r) {
        for (int a = 0; a < d; ++a) {
          double da = static_cast<double>(sup[r][a]) - ms.mean[a];
          ms.fourth_central[a] += pr[r] * da * da * da * da;
          for (int b = 0; b < d; ++b) {
            double db = static_cast<double>(sup[r][b]) - ms.mean[b];
            ms.cov.at(a, b) += pr[r] * da * db;
          }
        }
      }
      return ms;
    }
    case DiscreteLaw::Kind::Poisson:
      for (int l = 0; l < d; ++l) {
        double r = law.rates()[l];
        ms.mean[l] = r;
        ms.cov.at(l, l) = r;
        ms.fourth_central[l] = r * (1.0 + 3.0 * r);
      }
      return ms;
    case DiscreteLaw::Kind::BernoulliVector: {
      const double q = law.q();
      for (int l = 0; l < d; ++l) ms.mean[l] = q * static_cast<double>(law.point()[l]);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          ms.cov.at(a, b) = q * (1.0 - q) * static_cast<double>(law.point()[a]) *
                            static_cast<double>(law.point()[b]);
      // E[(X_l - q v_l)^4] = q (1-q) v_l^4 ((1-q)^3 + q^3)
      for (int l = 0; l < d; ++l) {
        double v = static_cast<double>(law.point()[l]);
        double v2 = v * v;
        ms.fourth_central[l] =
            q * (1.0 - q) * v2 * v2 * ((1.0 - q) * (1.0 - q) * (1.0 - q) + q * q * q);
      }
      return ms;
    }
    case DiscreteLaw::Kind::Product:
      for (int l = 0; l < d; ++l) {
        MomentSummary c = moments(law.components()[l]);
        ms.mean[l] = c.mean[0];
        ms.cov.at(l, l) = c.cov.at(0, 0);
        ms.fourth_central[l] = c.fourth_central[0];
      }
      return ms;
    case DiscreteLaw::Kind::Shifted: {
      ms = moments(law.base());
      for (int l = 0; l < d; ++l) ms.mean[l] += static_cast<double>(law.offset()[l]);
      return ms;
    }
  }
  throw ConfigError("moments: unknown law kind");
}

double fourth_moment_random_sum(double sigma2_A, double zeta_A, double mu_B, double gamma_B) {
  if (sigma2_A < 0.0) throw ConfigError("fourth_moment_random_sum: sigma2_A must be >= 0");
  if (zeta_A < sigma2_A * sigma2_A - 1e-9)
    throw ConfigError("fourth_moment_random_sum: zeta_A below sigma2_A^2 violates Jensen");
  if (mu_B < 0.0) throw ConfigError("fourth_moment_random_sum: mu_B must be >= 0");
  if (gamma_B < 0.0) throw ConfigError("fourth_moment_random_sum: gamma_B must be >= 0");
  const double s4 = sigma2_A * sigma2_A;
  return 3.0 * s4 * (gamma_B + mu_B * mu_B) + (zeta_A - 3.0 * s4) * mu_B;
}

}  // namespace cmbp
