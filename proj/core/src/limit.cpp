#include "cmbp/limit.hpp"

#include <cmath>

#include "cmbp/engine.hpp"
#include "cmbp/errors.hpp"
#include "cmbp/rng.hpp"
#include "cmbp/stats.hpp"

namespace cmbp {

double GammaMarginal::mean() const {
  if (kind == Kind::DegenerateLine) return line_value;
  return shape / rate;
}

double GammaMarginal::cdf(double x) const {
  if (kind == Kind::DegenerateLine) return x >= line_value ? 1.0 : 0.0;
  if (x <= 0.0) return 0.0;
  return gamma_cdf(shape, rate, x);
}

SdePath euler_maruyama(double b, double sigma2, double T, double dt, std::uint64_t master_seed,
                       std::uint64_t path_id) {
  if (!(dt > 0.0)) throw ConfigError("euler_maruyama: dt must be positive");
  if (T < dt) throw ConfigError("euler_maruyama: horizon shorter than one step");
  if (sigma2 < 0.0) throw ConfigError("euler_maruyama: negative diffusion scale");
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  const double sqrt_dt = std::sqrt(dt);

  RngStream rng =
      RngStream::from_root(master_seed, path_id).substream(stream_lane::kDiffusion);
  SdePath path;
  path.dt = dt;
  path.path_id = path_id;
  path.values.reserve(steps + 1);
  double x = 0.0;
  path.values.push_back(x);
  for (std::size_t j = 0; j < steps; ++j) {
    double vol = std::sqrt(sigma2 * std::max(x, 0.0));
    x += b * dt + vol * sqrt_dt * rng.next_normal();
    path.values.push_back(x);
  }
  return path;
}

GammaMarginal gamma_marginal(double b, double sigma2, double t) {
  if (!(t > 0.0)) throw ConfigError("gamma_marginal: t must be positive");
  if (b < 0.0) throw ConfigError("gamma_marginal: negative drift has no closed-form marginal");
  if (sigma2 < 0.0) throw ConfigError("gamma_marginal: negative diffusion scale");
  GammaMarginal m;
  m.t = t;
  if (sigma2 == 0.0 || b == 0.0) {
    // Zero noise rides the line b*t; zero drift from a zero start is
    // absorbed at the origin.
    m.kind = GammaMarginal::Kind::DegenerateLine;
    m.line_value = b * t;
    return m;
  }
  m.kind = GammaMarginal::Kind::Gamma;
  m.shape = 2.0 * b / sigma2;
  m.rate = 2.0 / (sigma2 * t);
  return m;
}

std::vector<Vec> limit_ray_path(const SdePath& sde, const Vec& direction) {
  std::vector<Vec> out;
  out.reserve(sde.values.size());
  for (double x : sde.values) {
    Vec v(direction.size());
    for (std::size_t l = 0; l < direction.size(); ++l) v[l] = x * direction[l];
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<double> em_terminal_values(double b, double sigma2, double T, double dt,
                                       std::uint64_t n_paths, std::uint64_t master_seed,
                                       int threads) {
  if (n_paths < 1) throw ConfigError("em_terminal_values: need at least one path");
  return parallel_map_ordered(n_paths, threads, [&](std::uint64_t id) {
    return euler_maruyama(b, sigma2, T, dt, master_seed, id).values.back();
  });
}

}  // namespace cmbp
