#include "cmbp/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cmbp/errors.hpp"
#include "cmbp/presets.hpp"

namespace cmbp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ctx, const std::string& what) {
  throw ConfigError(ctx + ": " + what);
}

void check_keys(const json& obj, const std::string& ctx, std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(ctx, "unknown field '" + item.key() + "'");
  }
}

const json& require(const json& obj, const std::string& ctx, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ctx, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t as_int(const json& j, const std::string& ctx) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<std::int64_t>();
  fail(ctx, "expected an integer");
}

std::uint64_t as_uint(const json& j, const std::string& ctx) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  fail(ctx, "expected a nonnegative integer");
}

double as_double(const json& j, const std::string& ctx) {
  if (j.is_number()) return j.get<double>();
  fail(ctx, "expected a number");
}

bool as_bool(const json& j, const std::string& ctx) {
  if (j.is_boolean()) return j.get<bool>();
  fail(ctx, "expected a boolean");
}

std::string as_string(const json& j, const std::string& ctx) {
  if (j.is_string()) return j.get<std::string>();
  fail(ctx, "expected a string");
}

IVec as_ivec(const json& j, const std::string& ctx) {
  if (!j.is_array()) fail(ctx, "expected an array of integers");
  IVec out;
  out.reserve(j.size());
  for (std::size_t l = 0; l < j.size(); ++l) out.push_back(as_int(j[l], ctx));
  return out;
}

Vec as_vec(const json& j, const std::string& ctx) {
  if (!j.is_array()) fail(ctx, "expected an array of numbers");
  Vec out;
  out.reserve(j.size());
  for (std::size_t l = 0; l < j.size(); ++l) out.push_back(as_double(j[l], ctx));
  return out;
}

Matrix as_matrix(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) fail(ctx, "expected an array of rows");
  const auto p = j.size();
  Matrix a(static_cast<int>(p));
  for (std::size_t r = 0; r < p; ++r) {
    if (!j[r].is_array() || j[r].size() != p) fail(ctx, "rows must be square");
    for (std::size_t c = 0; c < p; ++c)
      a.at(static_cast<int>(r), static_cast<int>(c)) = as_double(j[r][c], ctx);
  }
  return a;
}

json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (int r = 0; r < a.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < a.dim(); ++c) row.push_back(a.at(r, c));
    rows.push_back(row);
  }
  return rows;
}

DiscreteLaw law_from_json(const json& j, const std::string& ctx);

json law_to_json(const DiscreteLaw& law) {
  json out;
  switch (law.kind()) {
    case DiscreteLaw::Kind::Deterministic:
      out["kind"] = "deterministic";
      out["point"] = law.point();
      break;
    case DiscreteLaw::Kind::Table: {
      out["kind"] = "table";
      out["support"] = law.support();
      out["probs"] = law.probs();
      break;
    }
    case DiscreteLaw::Kind::Poisson:
      out["kind"] = "poisson";
      out["rates"] = law.rates();
      break;
    case DiscreteLaw::Kind::BernoulliVector:
      out["kind"] = "bernoulli_vector";
      out["point"] = law.point();
      out["q"] = law.q();
      break;
    case DiscreteLaw::Kind::Product: {
      out["kind"] = "product";
      json comps = json::array();
      for (const auto& c : law.components()) comps.push_back(law_to_json(c));
      out["components"] = comps;
      break;
    }
    case DiscreteLaw::Kind::Shifted:
      out["kind"] = "shifted";
      out["base"] = law_to_json(law.base());
      out["offset"] = law.offset();
      break;
  }
  return out;
}

DiscreteLaw law_from_json(const json& j, const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected a law object");
  const std::string kind = as_string(require(j, ctx, "kind"), ctx + ".kind");
  if (kind == "deterministic") {
    check_keys(j, ctx, {"kind", "point"});
    return DiscreteLaw::deterministic(as_ivec(require(j, ctx, "point"), ctx + ".point"));
  }
  if (kind == "table") {
    check_keys(j, ctx, {"kind", "support", "probs"});
    const json& sup = require(j, ctx, "support");
    if (!sup.is_array()) fail(ctx, "support must be an array of points");
    std::vector<IVec> support;
    support.reserve(sup.size());
    for (std::size_t r = 0; r < sup.size(); ++r)
      support.push_back(as_ivec(sup[r], ctx + ".support"));
    return DiscreteLaw::table(std::move(support), as_vec(require(j, ctx, "probs"), ctx + ".probs"));
  }
  if (kind == "poisson") {
    check_keys(j, ctx, {"kind", "rates"});
    return DiscreteLaw::poisson(as_vec(require(j, ctx, "rates"), ctx + ".rates"));
  }
  if (kind == "bernoulli_vector") {
    check_keys(j, ctx, {"kind", "point", "q"});
    return DiscreteLaw::bernoulli_vector(as_ivec(require(j, ctx, "point"), ctx + ".point"),
                                         as_double(require(j, ctx, "q"), ctx + ".q"));
  }
  if (kind == "product") {
    check_keys(j, ctx, {"kind", "components"});
    const json& comps = require(j, ctx, "components");
    if (!comps.is_array()) fail(ctx, "components must be an array of laws");
    std::vector<DiscreteLaw> components;
    components.reserve(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c)
      components.push_back(law_from_json(comps[c], ctx + ".components"));
    return DiscreteLaw::product(std::move(components));
  }
  if (kind == "shifted") {
    check_keys(j, ctx, {"kind", "base", "offset"});
    return DiscreteLaw::shifted(law_from_json(require(j, ctx, "base"), ctx + ".base"),
                                as_ivec(require(j, ctx, "offset"), ctx + ".offset"));
  }
  fail(ctx, "unknown law kind '" + kind + "'");
}

ControlLaw control_from_json(const json& j, const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected a control object");
  const std::string kind = as_string(require(j, ctx, "kind"), ctx + ".kind");
  if (kind == "identity") {
    check_keys(j, ctx, {"kind", "dim"});
    return ControlLaw::identity(static_cast<int>(as_int(require(j, ctx, "dim"), ctx + ".dim")));
  }
  if (kind == "affine_deterministic") {
    check_keys(j, ctx, {"kind", "matrix", "offset", "origin_override"});
    Matrix coeff = as_matrix(require(j, ctx, "matrix"), ctx + ".matrix");
    Vec offset = as_vec(require(j, ctx, "offset"), ctx + ".offset");
    if (j.contains("origin_override"))
      return ControlLaw::affine_deterministic(
          std::move(coeff), std::move(offset),
          as_ivec(j["origin_override"], ctx + ".origin_override"));
    return ControlLaw::affine_deterministic(std::move(coeff), std::move(offset));
  }
  if (kind == "append_unit") {
    check_keys(j, ctx, {"kind", "dim"});
    return ControlLaw::append_unit(static_cast<int>(as_int(require(j, ctx, "dim"), ctx + ".dim")));
  }
  if (kind == "migration") {
    check_keys(j, ctx, {"kind", "laws"});
    const json& arr = require(j, ctx, "laws");
    if (!arr.is_array()) fail(ctx, "laws must be an array");
    std::vector<DiscreteLaw> laws;
    laws.reserve(arr.size());
    for (std::size_t l = 0; l < arr.size(); ++l)
      laws.push_back(law_from_json(arr[l], ctx + ".laws"));
    return ControlLaw::migration(std::move(laws));
  }
  if (kind == "immigration") {
    check_keys(j, ctx, {"kind", "law"});
    return ControlLaw::immigration(law_from_json(require(j, ctx, "law"), ctx + ".law"));
  }
  if (kind == "mating_promiscuous") {
    check_keys(j, ctx, {"kind"});
    return ControlLaw::mating_promiscuous();
  }
  if (kind == "mating_selffert") {
    check_keys(j, ctx, {"kind"});
    return ControlLaw::mating_selffert();
  }
  if (kind == "table") {
    check_keys(j, ctx, {"kind", "entries", "fallback"});
    const json& arr = require(j, ctx, "entries");
    if (!arr.is_array()) fail(ctx, "entries must be an array");
    std::vector<std::pair<IVec, DiscreteLaw>> entries;
    entries.reserve(arr.size());
    for (std::size_t e = 0; e < arr.size(); ++e) {
      const json& row = arr[e];
      check_keys(row, ctx + ".entries", {"state", "law"});
      entries.emplace_back(as_ivec(require(row, ctx, "state"), ctx + ".entries.state"),
                           law_from_json(require(row, ctx, "law"), ctx + ".entries.law"));
    }
    const std::string fb = as_string(require(j, ctx, "fallback"), ctx + ".fallback");
    ControlLaw::Fallback fallback;
    if (fb == "error")
      fallback = ControlLaw::Fallback::Error;
    else if (fb == "identity")
      fallback = ControlLaw::Fallback::Identity;
    else
      fail(ctx, "fallback must be 'error' or 'identity'");
    return ControlLaw::table(std::move(entries), fallback);
  }
  fail(ctx, "unknown control kind '" + kind + "'");
}

json control_to_json(const ControlLaw& control) {
  json out;
  switch (control.kind()) {
    case ControlLaw::Kind::Identity:
      out["kind"] = "identity";
      out["dim"] = control.dim();
      break;
    case ControlLaw::Kind::AffineDeterministic:
      out["kind"] = "affine_deterministic";
      out["matrix"] = matrix_to_json(control.coeff());
      out["offset"] = control.offset();
      if (control.has_origin_override()) out["origin_override"] = control.origin_override();
      break;
    case ControlLaw::Kind::AppendUnit:
      out["kind"] = "append_unit";
      out["dim"] = control.dim();
      break;
    case ControlLaw::Kind::Migration: {
      out["kind"] = "migration";
      json laws = json::array();
      for (const auto& l : control.migration_laws()) laws.push_back(law_to_json(l));
      out["laws"] = laws;
      break;
    }
    case ControlLaw::Kind::Immigration:
      out["kind"] = "immigration";
      out["law"] = law_to_json(control.immigration_law());
      break;
    case ControlLaw::Kind::MatingPromiscuous:
      out["kind"] = "mating_promiscuous";
      break;
    case ControlLaw::Kind::MatingSelffert:
      out["kind"] = "mating_selffert";
      break;
    case ControlLaw::Kind::Table: {
      out["kind"] = "table";
      json entries = json::array();
      for (const auto& [state, law] : control.entries()) {
        json row;
        row["state"] = state;
        row["law"] = law_to_json(law);
        entries.push_back(row);
      }
      out["entries"] = entries;
      out["fallback"] = control.fallback() == ControlLaw::Fallback::Error ? "error" : "identity";
      break;
    }
  }
  return out;
}

ModelSpec model_from_json(const json& j) {
  const std::string ctx = "model";
  if (!j.is_object()) fail(ctx, "expected an object");
  const std::string type = as_string(require(j, ctx, "type"), ctx + ".type");
  if (type == "explicit") {
    check_keys(j, ctx,
               {"type", "p", "offspring", "control", "lambda", "alpha", "z0", "force_naive_sums"});
    const int p = static_cast<int>(as_int(require(j, ctx, "p"), ctx + ".p"));
    const json& off = require(j, ctx, "offspring");
    if (!off.is_array()) fail(ctx, "offspring must be an array of laws");
    std::vector<DiscreteLaw> offspring;
    offspring.reserve(off.size());
    for (std::size_t i = 0; i < off.size(); ++i)
      offspring.push_back(law_from_json(off[i], ctx + ".offspring"));
    ModelSpec model(p, std::move(offspring),
                    control_from_json(require(j, ctx, "control"), ctx + ".control"),
                    as_matrix(require(j, ctx, "lambda"), ctx + ".lambda"),
                    as_vec(require(j, ctx, "alpha"), ctx + ".alpha"),
                    law_from_json(require(j, ctx, "z0"), ctx + ".z0"));
    if (j.contains("force_naive_sums"))
      model.force_naive_sums = as_bool(j["force_naive_sums"], ctx + ".force_naive_sums");
    return model;
  }
  if (type == "preset") {
    check_keys(j, ctx, {"type", "name", "params"});
    const std::string name = as_string(require(j, ctx, "name"), ctx + ".name");
    const json empty = json::object();
    const json& params = j.contains("params") ? j["params"] : empty;
    if (!params.is_object()) fail(ctx, "params must be an object");
    const std::string pctx = ctx + ".params";
    if (name == "two_sex_promiscuous" || name == "two_sex_selffert") {
      check_keys(params, pctx, {"offspring", "immigration", "z0"});
      DiscreteLaw offspring = law_from_json(require(params, pctx, "offspring"), pctx + ".offspring");
      DiscreteLaw immigration =
          law_from_json(require(params, pctx, "immigration"), pctx + ".immigration");
      const bool prom = name == "two_sex_promiscuous";
      if (params.contains("z0")) {
        DiscreteLaw z0 = law_from_json(params["z0"], pctx + ".z0");
        return prom ? presets::two_sex_promiscuous(std::move(offspring), std::move(immigration),
                                                   std::move(z0))
                    : presets::two_sex_selffert(std::move(offspring), std::move(immigration),
                                                std::move(z0));
      }
      return prom ? presets::two_sex_promiscuous(std::move(offspring), std::move(immigration))
                  : presets::two_sex_selffert(std::move(offspring), std::move(immigration));
    }
    if (name == "deterministic_ray") {
      check_keys(params, pctx, {});
      return presets::deterministic_ray();
    }
    if (name == "uniform_migration") {
      check_keys(params, pctx, {});
      return presets::uniform_migration();
    }
    if (name == "mbpi_embedding" || name == "mbpi_migration_repr") {
      check_keys(params, pctx, {"offspring", "immigration", "y0"});
      const json& off = require(params, pctx, "offspring");
      if (!off.is_array()) fail(pctx, "offspring must be an array of laws");
      std::vector<DiscreteLaw> offspring;
      offspring.reserve(off.size());
      for (std::size_t i = 0; i < off.size(); ++i)
        offspring.push_back(law_from_json(off[i], pctx + ".offspring"));
      DiscreteLaw immigration =
          law_from_json(require(params, pctx, "immigration"), pctx + ".immigration");
      const bool embed = name == "mbpi_embedding";
      if (params.contains("y0")) {
        IVec y0 = as_ivec(params["y0"], pctx + ".y0");
        return embed ? presets::mbpi_embedding(std::move(offspring), std::move(immigration),
                                               std::move(y0))
                     : presets::mbpi_migration_repr(std::move(offspring), std::move(immigration),
                                                    std::move(y0));
      }
      return embed ? presets::mbpi_embedding(std::move(offspring), std::move(immigration))
                   : presets::mbpi_migration_repr(std::move(offspring), std::move(immigration));
    }
    std::string names;
    for (const auto& entry : presets::catalog()) {
      if (!names.empty()) names += ", ";
      names += entry.first;
    }
    fail(ctx, "unknown preset '" + name + "' (available: " + names + ")");
  }
  fail(ctx, "type must be 'explicit' or 'preset'");
}

json model_to_json(const ModelSpec& model) {
  json out;
  out["type"] = "explicit";
  out["p"] = model.p();
  json off = json::array();
  for (const auto& law : model.offspring()) off.push_back(law_to_json(law));
  out["offspring"] = off;
  out["control"] = control_to_json(model.control());
  out["lambda"] = matrix_to_json(model.lambda());
  out["alpha"] = model.alpha();
  out["z0"] = law_to_json(model.z0());
  if (model.force_naive_sums) out["force_naive_sums"] = true;
  return out;
}

json parse_document(const std::string& text, const std::string& ctx) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ctx, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  const std::string ctx = "config";
  const json j = parse_document(text, ctx);
  if (!j.is_object()) fail(ctx, "top level must be an object");
  check_keys(j, ctx,
             {"schema_version", "model", "master_seed", "K", "trajectories", "n", "t", "T", "dt",
              "theta", "k_max", "growth_trajectories", "delta", "ratio_i", "ratio_j",
              "tolerance_band", "out", "threads"});
  const auto version = as_int(require(j, ctx, "schema_version"), ctx + ".schema_version");
  if (version != 1) fail(ctx, "unsupported schema_version " + std::to_string(version));

  RunConfig cfg;
  cfg.model = model_from_json(require(j, ctx, "model"));
  cfg.master_seed = as_uint(require(j, ctx, "master_seed"), ctx + ".master_seed");
  if (j.contains("K")) cfg.K = as_int(j["K"], ctx + ".K");
  if (j.contains("trajectories")) cfg.trajectories = as_uint(j["trajectories"], ctx + ".trajectories");
  if (j.contains("n")) cfg.n = static_cast<int>(as_int(j["n"], ctx + ".n"));
  if (j.contains("t")) cfg.t = as_double(j["t"], ctx + ".t");
  if (j.contains("T")) cfg.T = as_double(j["T"], ctx + ".T");
  if (j.contains("dt")) cfg.dt = as_double(j["dt"], ctx + ".dt");
  if (j.contains("theta")) cfg.theta = as_double(j["theta"], ctx + ".theta");
  if (j.contains("k_max")) cfg.k_max = as_int(j["k_max"], ctx + ".k_max");
  if (j.contains("growth_trajectories"))
    cfg.growth_trajectories = as_uint(j["growth_trajectories"], ctx + ".growth_trajectories");
  if (j.contains("delta")) cfg.delta = as_double(j["delta"], ctx + ".delta");
  if (j.contains("ratio_i")) cfg.ratio_i = static_cast<int>(as_int(j["ratio_i"], ctx + ".ratio_i"));
  if (j.contains("ratio_j")) cfg.ratio_j = static_cast<int>(as_int(j["ratio_j"], ctx + ".ratio_j"));
  if (j.contains("tolerance_band"))
    cfg.tolerance_band = as_double(j["tolerance_band"], ctx + ".tolerance_band");
  if (j.contains("out")) cfg.out = as_string(j["out"], ctx + ".out");
  if (j.contains("threads")) cfg.threads = static_cast<int>(as_int(j["threads"], ctx + ".threads"));

  if (cfg.K < 0) fail(ctx, "K must be nonnegative");
  if (cfg.trajectories < 1) fail(ctx, "trajectories must be positive");
  if (cfg.n < 1) fail(ctx, "n must be positive");
  if (!(cfg.t > 0.0)) fail(ctx, "t must be positive");
  if (!(cfg.T > 0.0)) fail(ctx, "T must be positive");
  if (!(cfg.dt > 0.0)) fail(ctx, "dt must be positive");
  if (!(cfg.theta > 0.0)) fail(ctx, "theta must be positive");
  if (cfg.k_max < 1) fail(ctx, "k_max must be positive");
  if (cfg.growth_trajectories < 1) fail(ctx, "growth_trajectories must be positive");
  if (!(cfg.delta > 0.0)) fail(ctx, "delta must be positive");
  if (cfg.ratio_i < 0 || cfg.ratio_j < 0) fail(ctx, "ratio indices must be nonnegative");
  if (!(cfg.tolerance_band >= 0.0)) fail(ctx, "tolerance_band must be nonnegative");
  if (cfg.threads < 0) fail(ctx, "threads must be nonnegative (0 = all cores)");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string model_to_json_text(const ModelSpec& model) { return model_to_json(model).dump(); }

ModelSpec model_from_json_text(const std::string& text) {
  return model_from_json(parse_document(text, "model"));
}

std::string model_hash(const ModelSpec& model) {
  const std::string doc = model_to_json_text(model);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : doc) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return std::string(buf);
}

}  // namespace cmbp
