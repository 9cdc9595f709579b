#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cmbp/model.hpp"

namespace cmbp {

// Run parameters parsed from a config document. schema_version, model and
// master_seed are required; everything else carries the default below.
// Unknown fields are rejected, so a typo never silently falls back.
struct RunConfig {
  std::optional<ModelSpec> model;
  std::uint64_t master_seed = 0;
  std::int64_t K = 100;               // generations per simulated trajectory
  std::uint64_t trajectories = 1000;  // Monte Carlo sample count
  int n = 100;                        // scaling index
  double t = 1.0;                     // marginal time
  double T = 1.0;                     // horizon
  double dt = 1e-3;                   // SDE step
  double theta = 0.5;                 // truncation threshold
  std::int64_t k_max = 2000;          // growth-check horizon
  std::uint64_t growth_trajectories = 200;
  double delta = 0.05;                // frequency tolerance
  int ratio_i = 0;                    // frequency pair, 0-based type indices
  int ratio_j = 1;
  double tolerance_band = 1e-9;       // criticality band
  std::string out;                    // CSV destination; empty = no file
  int threads = 0;                    // 0 = all available cores
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Canonical document for a model: sorted keys, explicit form (presets
// serialize to the model they build). Parsing it back yields an
// equivalent model.
std::string model_to_json_text(const ModelSpec& model);
ModelSpec model_from_json_text(const std::string& text);

// FNV-1a (64-bit) of the canonical model document, as 16 hex digits.
std::string model_hash(const ModelSpec& model);

}  // namespace cmbp
