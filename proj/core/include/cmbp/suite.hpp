#pragma once

#include <string>

#include "cmbp/config.hpp"

namespace cmbp {

struct SuiteResult {
  std::string report;  // JSON array, one object per check
  bool all_pass = false;
};

// Runs the whole verification battery for the configured model and renders
// the report. All reductions happen in stream-id order, so the report
// bytes depend only on the config contents, never on the thread count.
// Throws ConfigError when the model fails a precondition (non-critical).
SuiteResult run_verify_suite(const RunConfig& cfg, int threads);

}  // namespace cmbp
