#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cmbp/engine.hpp"
#include "cmbp/limit.hpp"

namespace cmbp {

// Shortest decimal that parses back to exactly x.
std::string format_double(double x);

// Long format, one population vector per row:
//   trajectory_id,k,Z_1,...,Z_p
void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& trajectories, int p);

// One grid value per row, t = j * dt:
//   path_id,j,t,X
void write_sde_csv(std::ostream& os, const std::vector<SdePath>& paths);

}  // namespace cmbp
