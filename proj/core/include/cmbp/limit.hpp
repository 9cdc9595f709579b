#pragma once

#include <cstdint>
#include <vector>

#include "cmbp/matrix.hpp"

namespace cmbp {

// One discretized path of the scalar limit diffusion, on the grid t_j = j*dt.
struct SdePath {
  double dt = 0.0;
  std::vector<double> values;
  std::uint64_t path_id = 0;
};

// Closed-form one-dimensional marginal of the limit at a fixed time:
// either a Gamma law (shape 2b/sigma2, rate 2/(sigma2 t)) or, when the
// noise or the drift vanishes, the degenerate point b*t.
struct GammaMarginal {
  enum class Kind { DegenerateLine, Gamma };
  Kind kind = Kind::DegenerateLine;
  double shape = 0.0;
  double rate = 0.0;
  double t = 0.0;
  double line_value = 0.0;

  double mean() const;
  double cdf(double x) const;
};

// Explicit Euler scheme for dX = b dt + sqrt(sigma2 * max(X, 0)) dW from
// X_0 = 0: the diffusion coefficient is truncated at zero exactly like the
// x+ inside the limit equation (no reflection, no implicitness).
SdePath euler_maruyama(double b, double sigma2, double T, double dt, std::uint64_t master_seed,
                       std::uint64_t path_id = 0);

GammaMarginal gamma_marginal(double b, double sigma2, double t);

// Lifts a scalar path onto the ray it lives on: out[j] = values[j] * direction.
std::vector<Vec> limit_ray_path(const SdePath& sde, const Vec& direction);

// Terminal values X_T of n_paths independent Euler paths, in path-id order.
std::vector<double> em_terminal_values(double b, double sigma2, double T, double dt,
                                       std::uint64_t n_paths, std::uint64_t master_seed,
                                       int threads = 1);

}  // namespace cmbp
