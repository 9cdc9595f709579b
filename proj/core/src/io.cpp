#include "cmbp/io.hpp"

#include <charconv>
#include <system_error>

#include "cmbp/errors.hpp"

namespace cmbp {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc{}) throw NumericError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& trajectories, int p) {
  os << "trajectory_id,k";
  for (int l = 1; l <= p; ++l) os << ",Z_" << l;
  os << '\n';
  for (const auto& traj : trajectories) {
    if (traj.p != p)
      throw ConfigError("write_trajectories_csv: trajectory dimension does not match header");
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
      os << traj.stream_id << ',' << k;
      for (int l = 0; l < p; ++l) os << ',' << traj.steps[k][static_cast<std::size_t>(l)];
      os << '\n';
    }
  }
}

void write_sde_csv(std::ostream& os, const std::vector<SdePath>& paths) {
  os << "path_id,j,t,X\n";
  for (const auto& path : paths) {
    for (std::size_t j = 0; j < path.values.size(); ++j) {
      os << path.path_id << ',' << j << ',' << format_double(static_cast<double>(j) * path.dt) << ','
         << format_double(path.values[j]) << '\n';
    }
  }
}

}  // namespace cmbp
