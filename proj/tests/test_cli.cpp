#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>

#include "json.hpp"

#include "helpers.hpp"

namespace {

using nlohmann::json;

std::string cli() { return CMBP_CLI_PATH; }

const char* kRayConfig = R"({
  "schema_version": 1,
  "master_seed": 123,
  "K": 3,
  "trajectories": 2,
  "model": {"type": "preset", "name": "deterministic_ray", "params": {}}
})";

const char* kPromiscuousModel = R"("model": {
  "type": "preset",
  "name": "two_sex_promiscuous",
  "params": {
    "offspring": {"kind": "product", "components": [
      {"kind": "poisson", "rates": [1.0]}, {"kind": "poisson", "rates": [1.0]}]},
    "immigration": {"kind": "product", "components": [
      {"kind": "poisson", "rates": [1.0]}, {"kind": "deterministic", "point": [1]}]}
  }
})";

std::string promiscuous_config(const std::string& extra) {
  return std::string("{\"schema_version\": 1, \"master_seed\": 99, ") + kPromiscuousModel +
         extra + "}";
}

}  // namespace

TEST_CASE("preset list names every preset") {
  auto res = testutil::run_command(cli() + " preset list");
  CHECK(res.exit_code == 0);
  for (const char* name :
       {"two_sex_promiscuous", "two_sex_selffert", "deterministic_ray", "uniform_migration",
        "mbpi_embedding", "mbpi_migration_repr"})
    CHECK(res.out.find(name) != std::string::npos);
  CHECK(res.out.find('\t') != std::string::npos);
}

TEST_CASE("classify emits a machine-readable verdict") {
  testutil::write_file("/tmp/cmbp_cli_prom.json", promiscuous_config(""));
  auto res = testutil::run_command(cli() + " classify --config /tmp/cmbp_cli_prom.json");
  REQUIRE(res.exit_code == 0);
  json doc = json::parse(res.out);
  CHECK(doc.at("criticality") == "critical");
  CHECK(doc.at("rho").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(doc.at("model_hash").get<std::string>().size() == 16);
  CHECK(doc.at("u").size() == 2);
  CHECK(doc.at("v").size() == 2);
  CHECK(doc.at("u")[0].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(doc.at("tolerance_band").get<double>() == 1e-9);
}

TEST_CASE("bad inputs exit with status 2") {
  testutil::write_file("/tmp/cmbp_cli_bad.json", "{ this is not json");
  CHECK(testutil::run_command(cli() + " classify --config /tmp/cmbp_cli_bad.json").exit_code ==
        2);

  testutil::write_file("/tmp/cmbp_cli_unknown.json", promiscuous_config(R"(, "bogus": 1)"));
  CHECK(testutil::run_command(cli() + " classify --config /tmp/cmbp_cli_unknown.json")
            .exit_code == 2);

  CHECK(testutil::run_command(cli() + " classify --config /tmp/cmbp_cli_missing_file.json")
            .exit_code == 2);
  CHECK(testutil::run_command(cli() + " classify").exit_code == 2);
  CHECK(testutil::run_command(cli() + " simulate").exit_code == 2);
  CHECK(testutil::run_command(cli() + " verify").exit_code == 2);
  CHECK(testutil::run_command(cli() + " limit").exit_code == 2);
}

TEST_CASE("simulate prints the exact ray trajectories") {
  testutil::write_file("/tmp/cmbp_cli_ray.json", kRayConfig);
  auto res = testutil::run_command(cli() + " simulate --config /tmp/cmbp_cli_ray.json");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out ==
        "trajectory_id,k,Z_1,Z_2\n"
        "0,0,1,0\n"
        "0,1,2,0\n"
        "0,2,3,0\n"
        "0,3,4,0\n"
        "1,0,1,0\n"
        "1,1,2,0\n"
        "1,2,3,0\n"
        "1,3,4,0\n");
  CHECK(res.out.find('\r') == std::string::npos);

  // --out sends the same bytes to a file instead.
  std::remove("/tmp/cmbp_cli_ray.csv");
  auto res2 = testutil::run_command(cli() +
                                    " simulate --config /tmp/cmbp_cli_ray.json"
                                    " --out /tmp/cmbp_cli_ray.csv");
  REQUIRE(res2.exit_code == 0);
  CHECK(testutil::read_file("/tmp/cmbp_cli_ray.csv") == res.out);
}

TEST_CASE("simulate replays bytes for a fixed seed and thread count does not matter") {
  testutil::write_file("/tmp/cmbp_cli_sim.json",
                       promiscuous_config(R"(, "K": 40, "trajectories": 8)"));
  auto a = testutil::run_command(cli() + " simulate --config /tmp/cmbp_cli_sim.json");
  auto b = testutil::run_command(cli() + " simulate --config /tmp/cmbp_cli_sim.json");
  auto c = testutil::run_command(cli() +
                                 " simulate --config /tmp/cmbp_cli_sim.json --threads 3");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);

  // A seed override changes the sample, deterministically.
  auto d = testutil::run_command(cli() + " simulate --config /tmp/cmbp_cli_sim.json --seed 7");
  auto e = testutil::run_command(cli() + " simulate --config /tmp/cmbp_cli_sim.json --seed 7");
  REQUIRE(d.exit_code == 0);
  CHECK(d.out == e.out);
  CHECK(d.out != a.out);
}

TEST_CASE("limit reports coefficients and writes sde paths") {
  testutil::write_file("/tmp/cmbp_cli_limit.json",
                       promiscuous_config(R"(, "trajectories": 3, "dt": 0.25, "T": 0.5)"));
  std::remove("/tmp/cmbp_cli_sde.csv");
  auto res = testutil::run_command(cli() +
                                   " limit --config /tmp/cmbp_cli_limit.json"
                                   " --out /tmp/cmbp_cli_sde.csv");
  REQUIRE(res.exit_code == 0);
  json doc = json::parse(res.out);
  CHECK(doc.at("drift").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(doc.at("diffusion").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(doc.at("marginal").get<std::string>() == "gamma");
  CHECK(doc.at("shape").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(doc.at("rate").get<double>() == doctest::Approx(1.0).epsilon(1e-9));

  std::string csv = testutil::read_file("/tmp/cmbp_cli_sde.csv");
  CHECK(csv.rfind("path_id,j,t,X\n", 0) == 0);
  // 3 paths, each with 2 steps plus the start, plus the header line.
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 10);
}

TEST_CASE("verify fails fast on starved sample sizes") {
  testutil::write_file(
      "/tmp/cmbp_cli_verify_small.json",
      promiscuous_config(R"(, "trajectories": 50, "growth_trajectories": 50, "n": 10)"));
  auto res = testutil::run_command(cli() + " verify --config /tmp/cmbp_cli_verify_small.json");
  CHECK(res.exit_code == 1);
  json doc = json::parse(res.out);
  REQUIRE(doc.is_array());
  bool saw_insufficient = false;
  for (const auto& check : doc) {
    if (check.at("parameters").contains("status") &&
        check.at("parameters").at("status") == "insufficient_samples") {
      saw_insufficient = true;
      CHECK(check.at("pass") == false);
    }
  }
  CHECK(saw_insufficient);
}

TEST_CASE("verify refuses non-critical models") {
  std::string super = R"({"schema_version": 1, "master_seed": 1, "model": {
    "type": "preset", "name": "two_sex_promiscuous", "params": {
      "offspring": {"kind": "product", "components": [
        {"kind": "poisson", "rates": [1.3]}, {"kind": "poisson", "rates": [1.0]}]},
      "immigration": {"kind": "product", "components": [
        {"kind": "poisson", "rates": [1.0]}, {"kind": "deterministic", "point": [1]}]}}}})";
  testutil::write_file("/tmp/cmbp_cli_super.json", super);
  CHECK(testutil::run_command(cli() + " verify --config /tmp/cmbp_cli_super.json").exit_code ==
        2);
}

TEST_CASE("a full verify run passes and mirrors the report to a file") {
  std::string cfg = R"({
    "schema_version": 1,
    "master_seed": 20240817,
    "n": 500,
    "t": 1.0,
    "T": 1.0,
    "trajectories": 2000,
    "growth_trajectories": 300,
    "k_max": 2000,
    "threads": 2,
    "model": {"type": "preset", "name": "two_sex_selffert", "params": {
      "offspring": {"kind": "product", "components": [
        {"kind": "poisson", "rates": [0.3]}, {"kind": "poisson", "rates": [0.7]}]},
      "immigration": {"kind": "poisson", "rates": [1.0, 1.0]}}}
  })";
  testutil::write_file("/tmp/cmbp_cli_verify_full.json", cfg);
  std::remove("/tmp/cmbp_cli_verify_report.json");
  auto res = testutil::run_command(cli() +
                                   " verify --config /tmp/cmbp_cli_verify_full.json"
                                   " --out /tmp/cmbp_cli_verify_report.json");
  REQUIRE(res.exit_code == 0);
  json doc = json::parse(res.out);
  REQUIRE(doc.is_array());
  CHECK(doc.size() >= 7);
  for (const auto& check : doc) {
    CAPTURE(check.dump());
    CHECK(check.at("pass") == true);
    CHECK(check.at("model_hash").get<std::string>().size() == 16);
    CHECK(check.contains("statistic"));
    CHECK(check.contains("p_value_or_exponent"));
  }
  CHECK(testutil::read_file("/tmp/cmbp_cli_verify_report.json") == res.out);
}
