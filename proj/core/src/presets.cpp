#include "cmbp/presets.hpp"

#include <utility>

#include "cmbp/errors.hpp"

namespace cmbp::presets {

namespace {

void check_pair_law(const DiscreteLaw& law, const char* what) {
  if (law.dim() != 2) throw ConfigError(std::string(what) + ": law must be two-dimensional");
  if (!law.nonnegative()) throw ConfigError(std::string(what) + ": law must be nonnegative");
}

}  // namespace

ModelSpec two_sex_promiscuous(DiscreteLaw offspring, DiscreteLaw immigration) {
  return two_sex_promiscuous(std::move(offspring), std::move(immigration),
                             DiscreteLaw::deterministic({1, 1}));
}

ModelSpec two_sex_promiscuous(DiscreteLaw offspring, DiscreteLaw immigration, DiscreteLaw z0) {
  check_pair_law(offspring, "two_sex_promiscuous offspring");
  check_pair_law(immigration, "two_sex_promiscuous immigration");
  if (immigration.min_coordinate(1) < 1)
    throw ConfigError(
        "two_sex_promiscuous: immigration must bring at least one male per generation");
  std::vector<DiscreteLaw> laws;
  laws.push_back(std::move(offspring));
  laws.push_back(std::move(immigration));
  return ModelSpec(2, std::move(laws), ControlLaw::mating_promiscuous(),
                   Matrix{{1.0, 0.0}, {0.0, 0.0}}, Vec{0.0, 1.0}, std::move(z0));
}

ModelSpec two_sex_selffert(DiscreteLaw offspring, DiscreteLaw immigration) {
  return two_sex_selffert(std::move(offspring), std::move(immigration),
                          DiscreteLaw::deterministic({0, 0}));
}

ModelSpec two_sex_selffert(DiscreteLaw offspring, DiscreteLaw immigration, DiscreteLaw z0) {
  check_pair_law(offspring, "two_sex_selffert offspring");
  check_pair_law(immigration, "two_sex_selffert immigration");
  std::vector<DiscreteLaw> laws;
  laws.push_back(std::move(offspring));
  laws.push_back(std::move(immigration));
  return ModelSpec(2, std::move(laws), ControlLaw::mating_selffert(),
                   Matrix{{1.0, 1.0}, {0.0, 0.0}}, Vec{0.0, 1.0}, std::move(z0));
}

ModelSpec deterministic_ray() {
  std::vector<DiscreteLaw> laws;
  laws.push_back(DiscreteLaw::deterministic({1, 0}));
  laws.push_back(DiscreteLaw::deterministic({0, 0}));
  Matrix coeff{{1.0, 0.0}, {1.0, 1.0}};
  ControlLaw control =
      ControlLaw::affine_deterministic(coeff, Vec{1.0, -1.0}, IVec{0, 0});
  return ModelSpec(2, std::move(laws), std::move(control), coeff, Vec{1.0, -1.0},
                   DiscreteLaw::deterministic({1, 0}));
}

ModelSpec uniform_migration() {
  DiscreteLaw pair = DiscreteLaw::table({{0, 0}, {1, 1}}, {0.5, 0.5});
  std::vector<DiscreteLaw> laws{pair, pair};
  DiscreteLaw step = DiscreteLaw::table1({-1, 0, 1}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  ControlLaw control = ControlLaw::migration({step, step});
  return ModelSpec(2, std::move(laws), std::move(control), Matrix::identity(2), Vec{0.0, 0.0},
                   DiscreteLaw::deterministic({1, 1}));
}

ModelSpec mbpi_embedding(std::vector<DiscreteLaw> offspring, DiscreteLaw immigration) {
  IVec y0(offspring.size(), 0);
  return mbpi_embedding(std::move(offspring), std::move(immigration), std::move(y0));
}

ModelSpec mbpi_embedding(std::vector<DiscreteLaw> offspring, DiscreteLaw immigration, IVec y0) {
  const int p = static_cast<int>(offspring.size());
  if (p < 1) throw ConfigError("mbpi_embedding: need at least one offspring law");
  if (immigration.dim() != p || !immigration.nonnegative())
    throw ConfigError("mbpi_embedding: immigration law must be a nonnegative p-vector law");
  if (static_cast<int>(y0.size()) != p)
    throw ConfigError("mbpi_embedding: initial state dimension mismatch");
  const int big = p + 1;

  std::vector<DiscreteLaw> lifted;
  lifted.reserve(big);
  for (auto& law : offspring) {
    if (law.dim() != p || !law.nonnegative())
      throw ConfigError("mbpi_embedding: offspring laws must be nonnegative p-vector laws");
    lifted.push_back(law.with_zero_appended());
  }
  IVec unit_last(big, 0);
  unit_last[p] = 1;
  lifted.push_back(DiscreteLaw::shifted(immigration.with_zero_appended(), unit_last));

  Matrix lambda(big);
  for (int i = 0; i < p; ++i) lambda.at(i, i) = 1.0;
  Vec alpha(big, 0.0);
  alpha[p] = 1.0;

  IVec z0 = y0;
  z0.push_back(1);
  return ModelSpec(big, std::move(lifted), ControlLaw::append_unit(big), std::move(lambda),
                   std::move(alpha), DiscreteLaw::deterministic(std::move(z0)));
}

ModelSpec mbpi_migration_repr(std::vector<DiscreteLaw> offspring, DiscreteLaw immigration) {
  IVec y0(offspring.size(), 0);
  return mbpi_migration_repr(std::move(offspring), std::move(immigration), std::move(y0));
}

ModelSpec mbpi_migration_repr(std::vector<DiscreteLaw> offspring, DiscreteLaw immigration,
                              IVec y0) {
  const int p = static_cast<int>(offspring.size());
  if (p < 1) throw ConfigError("mbpi_migration_repr: need at least one offspring law");
  if (immigration.dim() != p || !immigration.nonnegative())
    throw ConfigError("mbpi_migration_repr: immigration law must be a nonnegative p-vector law");
  if (static_cast<int>(y0.size()) != p)
    throw ConfigError("mbpi_migration_repr: initial state dimension mismatch");
  Vec alpha = moments(immigration).mean;
  return ModelSpec(p, std::move(offspring), ControlLaw::immigration(std::move(immigration)),
                   Matrix::identity(p), std::move(alpha),
                   DiscreteLaw::deterministic(std::move(y0)));
}

std::vector<std::pair<std::string, std::string>> catalog() {
  return {
      {"two_sex_promiscuous",
       "two-sex process with immigration, mating units = females * min(1, males)"},
      {"two_sex_selffert",
       "two-sex process with immigration, mating units = females + males"},
      {"deterministic_ray", "deterministic two-type model moving along the ray (k+1, 0)"},
      {"uniform_migration",
       "two types, offspring (0,0)/(1,1) fair coin, uniform {-1,0,1} migration per coordinate"},
      {"mbpi_embedding",
       "branching with immigration embedded as p+1 types (immigration as a permanent unit)"},
      {"mbpi_migration_repr",
       "branching with immigration kept on p types via the control phi(z) = z + I"},
  };
}

}  // namespace cmbp::presets
