#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cmbp/model.hpp"

namespace cmbp::presets {

// Two-sex process with immigration under promiscuous mating: the state is
// (females, males), each mating unit is one female given at least one male,
// and one immigration batch arrives per generation. `offspring` is the
// joint (f, m) law per mating unit, `immigration` the joint law of the
// arriving batch; the male component of `immigration` must be >= 1 almost
// surely so the male population never dies out.
ModelSpec two_sex_promiscuous(DiscreteLaw offspring, DiscreteLaw immigration);
ModelSpec two_sex_promiscuous(DiscreteLaw offspring, DiscreteLaw immigration, DiscreteLaw z0);

// Two-sex process with immigration under self-fertilization mating: every
// individual founds a mating unit regardless of sex.
ModelSpec two_sex_selffert(DiscreteLaw offspring, DiscreteLaw immigration);
ModelSpec two_sex_selffert(DiscreteLaw offspring, DiscreteLaw immigration, DiscreteLaw z0);

// Fully deterministic two-type model whose path is the ray (k+1, 0): the
// control adds one type-1 progenitor per step and parks the surplus in a
// second type that produces nothing.
ModelSpec deterministic_ray();

// Two types, offspring (0,0) or (1,1) with probability 1/2 each, and an
// independent uniform {-1, 0, 1} migration step on every positive
// coordinate.
ModelSpec uniform_migration();

// A p-type branching process with one immigration batch per generation,
// embedded as a (p+1)-type controlled model: the extra type is a permanent
// unit individual whose "offspring" is the immigration batch.
ModelSpec mbpi_embedding(std::vector<DiscreteLaw> offspring, DiscreteLaw immigration);
ModelSpec mbpi_embedding(std::vector<DiscreteLaw> offspring, DiscreteLaw immigration, IVec y0);

// The same process kept on p types by folding immigration into the
// control: phi(z) = z + I with I drawn fresh each generation.
ModelSpec mbpi_migration_repr(std::vector<DiscreteLaw> offspring, DiscreteLaw immigration);
ModelSpec mbpi_migration_repr(std::vector<DiscreteLaw> offspring, DiscreteLaw immigration,
                              IVec y0);

// (name, one-line description) for every preset, CLI-facing.
std::vector<std::pair<std::string, std::string>> catalog();

}  // namespace cmbp::presets
