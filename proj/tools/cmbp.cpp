#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmbp/config.hpp"
#include "cmbp/engine.hpp"
#include "cmbp/errors.hpp"
#include "cmbp/io.hpp"
#include "cmbp/limit.hpp"
#include "cmbp/model.hpp"
#include "cmbp/presets.hpp"
#include "cmbp/suite.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;

struct Overrides {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
};

cmbp::RunConfig load_config(const Overrides& ov) {
  if (ov.config_path.empty()) throw cmbp::ConfigError("config: --config PATH is required");
  cmbp::RunConfig cfg = cmbp::load_run_config(ov.config_path);
  if (ov.seed_set) cfg.master_seed = ov.seed;
  if (!ov.out.empty()) cfg.out = ov.out;
  if (ov.threads >= 0) cfg.threads = ov.threads;
  return cfg;
}

int resolve_threads(const cmbp::RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw cmbp::ConfigError("cannot open output file '" + path + "'");
  return os;
}

int cmd_classify(const Overrides& ov) {
  const cmbp::RunConfig cfg = load_config(ov);
  const cmbp::CriticalityReport report = cmbp::classify(*cfg.model, cfg.tolerance_band);
  json out;
  out["model_hash"] = cmbp::model_hash(*cfg.model);
  out["rho"] = report.rho;
  out["criticality"] = cmbp::criticality_name(report.criticality);
  out["tolerance_band"] = report.tolerance_band;
  if (!report.note.empty()) out["note"] = report.note;
  if (report.spectral) {
    out["u"] = report.spectral->u;
    out["v"] = report.spectral->v;
    out["second_modulus"] = report.spectral->second_modulus;
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const Overrides& ov) {
  const cmbp::RunConfig cfg = load_config(ov);
  const cmbp::ModelSpec& model = *cfg.model;
  cmbp::McOutcome outcome;
  auto trajectories = cmbp::parallel_map_ordered(
      cfg.trajectories, resolve_threads(cfg),
      [&](std::uint64_t id) {
        return cmbp::simulate_trajectory(model, cfg.K, id, cfg.master_seed);
      },
      &outcome);
  // Overflowed streams left default records; drop them from the CSV but
  // account for every one of them on stderr.
  std::vector<cmbp::Trajectory> kept;
  kept.reserve(trajectories.size());
  for (std::uint64_t id = 0; id < trajectories.size(); ++id)
    if (!outcome.overflowed_id(id)) kept.push_back(std::move(trajectories[id]));
  if (!outcome.overflowed.empty()) {
    std::cerr << "overflowed trajectories: " << outcome.overflowed.size() << " of "
              << outcome.requested << " (ids:";
    for (auto id : outcome.overflowed) std::cerr << ' ' << id;
    std::cerr << ")\n";
  }
  if (cfg.out.empty()) {
    cmbp::write_trajectories_csv(std::cout, kept, model.p());
  } else {
    auto os = open_out(cfg.out);
    cmbp::write_trajectories_csv(os, kept, model.p());
  }
  return kExitOk;
}

int cmd_limit(const Overrides& ov) {
  const cmbp::RunConfig cfg = load_config(ov);
  const cmbp::LimitCoefficients lc = cmbp::limit_coefficients(*cfg.model);
  const cmbp::GammaMarginal marginal = cmbp::gamma_marginal(lc.drift, lc.diffusion, cfg.t);
  json out;
  out["model_hash"] = cmbp::model_hash(*cfg.model);
  out["drift"] = lc.drift;
  out["diffusion"] = lc.diffusion;
  out["direction"] = lc.direction;
  out["t"] = cfg.t;
  if (marginal.kind == cmbp::GammaMarginal::Kind::Gamma) {
    out["marginal"] = "gamma";
    out["shape"] = marginal.shape;
    out["rate"] = marginal.rate;
  } else {
    out["marginal"] = "degenerate_line";
    out["line_value"] = marginal.line_value;
  }
  std::cout << out.dump(2) << '\n';
  if (!cfg.out.empty()) {
    std::vector<cmbp::SdePath> paths;
    paths.reserve(cfg.trajectories);
    for (std::uint64_t id = 0; id < cfg.trajectories; ++id)
      paths.push_back(
          cmbp::euler_maruyama(lc.drift, lc.diffusion, cfg.T, cfg.dt, cfg.master_seed, id));
    auto os = open_out(cfg.out);
    cmbp::write_sde_csv(os, paths);
  } else {
    std::cerr << "no --out given; SDE paths not written\n";
  }
  return kExitOk;
}

int cmd_verify(const Overrides& ov) {
  const cmbp::RunConfig cfg = load_config(ov);
  const cmbp::SuiteResult result = cmbp::run_verify_suite(cfg, resolve_threads(cfg));
  std::cout << result.report;
  if (!cfg.out.empty()) {
    auto os = open_out(cfg.out);
    os << result.report;
  }
  return result.all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_preset_list() {
  for (const auto& entry : cmbp::presets::catalog())
    std::cout << entry.first << "\t" << entry.second << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled multi-type branching processes: classification, simulation, "
               "diffusion limits and statistical verification"};
  app.require_subcommand(1);

  Overrides ov;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ov.config_path, "JSON run configuration");
    sub->add_option("--seed", ov.seed, "override master_seed")->each([&](const std::string&) {
      ov.seed_set = true;
    });
    sub->add_option("--threads", ov.threads, "override worker thread count (0 = all cores)");
    sub->add_option("--out", ov.out, "override output path");
  };

  CLI::App* classify = app.add_subcommand("classify", "criticality report for a model");
  add_common(classify);
  CLI::App* simulate = app.add_subcommand("simulate", "sample trajectories to CSV");
  add_common(simulate);
  CLI::App* limit = app.add_subcommand("limit", "limit coefficients, Gamma marginal, SDE paths");
  add_common(limit);
  CLI::App* verify = app.add_subcommand("verify", "run the statistical verification suite");
  add_common(verify);
  CLI::App* preset = app.add_subcommand("preset", "model catalog");
  CLI::App* preset_list = preset->add_subcommand("list", "list available presets");
  preset->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (classify->parsed()) return cmd_classify(ov);
    if (simulate->parsed()) return cmd_simulate(ov);
    if (limit->parsed()) return cmd_limit(ov);
    if (verify->parsed()) return cmd_verify(ov);
    if (preset->parsed() && preset_list->parsed()) return cmd_preset_list();
  } catch (const cmbp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}
