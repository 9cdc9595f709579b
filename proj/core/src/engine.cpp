#include "cmbp/engine.hpp"

#include <algorithm>
#include <cmath>

namespace cmbp {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw OverflowError("population count exceeds 64-bit range");
  return r;
}

Vec to_real(const IVec& z) {
  Vec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(z[i]);
  return out;
}

}  // namespace

Simulation::Simulation(const ModelSpec& model, std::uint64_t stream_id,
                       std::uint64_t master_seed)
    : model_(&model), base_(RngStream::from_root(master_seed, stream_id)) {
  RngStream init = base_.substream(stream_lane::kInit);
  z_ = sample(model.z0(), init);
}

void Simulation::advance() {
  const int p = model_->p();
  RngStream ctrl = base_.substream(stream_lane::kControl, static_cast<std::uint64_t>(gen_));
  IVec phi = sample_control(model_->control(), z_, ctrl);
  IVec next(p, 0);
  for (int i = 0; i < p; ++i) {
    if (phi[i] <= 0) continue;
    RngStream off = base_.substream(stream_lane::kOffspring, static_cast<std::uint64_t>(gen_),
                                    static_cast<std::uint64_t>(i));
    IVec sum = sample_iid_sum(model_->offspring()[i], phi[i], off, model_->force_naive_sums);
    for (int l = 0; l < p; ++l) next[l] = checked_add(next[l], sum[l]);
  }
  z_ = std::move(next);
  ++gen_;
}

Trajectory simulate_trajectory(const ModelSpec& model, std::int64_t K, std::uint64_t stream_id,
                               std::uint64_t master_seed) {
  if (K < 0) throw ConfigError("simulate_trajectory: negative step count");
  Trajectory traj;
  traj.p = model.p();
  traj.stream_id = stream_id;
  traj.steps.reserve(static_cast<std::size_t>(K) + 1);
  simulate_visit(model, K, stream_id, master_seed,
                 [&](std::int64_t, const IVec& z) { traj.steps.push_back(z); });
  return traj;
}

std::vector<Vec> martingale_differences(const Trajectory& traj, const ModelSpec& model) {
  if (traj.steps.size() < 2)
    throw ConfigError("martingale_differences: trajectory needs at least two states");
  const int p = model.p();
  std::vector<Vec> diffs;
  diffs.reserve(traj.steps.size() - 1);
  for (std::size_t k = 1; k < traj.steps.size(); ++k) {
    Vec mean = conditional_mean(model, traj.steps[k - 1]);
    Vec d(p);
    for (int l = 0; l < p; ++l) d[l] = static_cast<double>(traj.steps[k][l]) - mean[l];
    diffs.push_back(std::move(d));
  }
  return diffs;
}

const Vec& StepPath::at_index(std::size_t k) const {
  if (k >= values.size()) throw ConfigError("step path: index beyond last step");
  return values[k];
}

const Vec& StepPath::at_time(double t) const {
  if (t < 0.0) throw ConfigError("step path: negative time");
  double idx = std::floor(static_cast<double>(n) * t);
  if (idx >= static_cast<double>(values.size()))
    throw ConfigError("step path: time beyond last step");
  return values[static_cast<std::size_t>(idx)];
}

StepPath scaled_path(const Trajectory& traj, int n) {
  if (n < 1) throw ConfigError("scaled_path: n must be >= 1");
  StepPath path;
  path.n = n;
  path.values.reserve(traj.steps.size());
  const double inv = 1.0 / static_cast<double>(n);
  for (const IVec& z : traj.steps) {
    Vec v = to_real(z);
    for (double& x : v) x *= inv;
    path.values.push_back(std::move(v));
  }
  return path;
}

StepPath martingale_step_path(const Trajectory& traj, const ModelSpec& model, int n) {
  if (n < 1) throw ConfigError("martingale_step_path: n must be >= 1");
  const int p = model.p();
  std::vector<Vec> diffs = martingale_differences(traj, model);
  StepPath path;
  path.n = n;
  path.values.reserve(traj.steps.size());
  const double inv = 1.0 / static_cast<double>(n);
  Vec acc = to_real(traj.steps[0]);
  Vec first(p);
  for (int l = 0; l < p; ++l) first[l] = acc[l] * inv;
  path.values.push_back(std::move(first));
  for (const Vec& d : diffs) {
    Vec v(p);
    for (int l = 0; l < p; ++l) {
      acc[l] += d[l];
      v[l] = acc[l] * inv;
    }
    path.values.push_back(std::move(v));
  }
  return path;
}

StepPath psi_n(const StepPath& f, int n, const ModelSpec& model) {
  if (n != f.n) throw ConfigError("psi_n: lattice mismatch between path and n");
  if (f.values.empty()) throw ConfigError("psi_n: empty path");
  if (f.p() != model.p()) throw ConfigError("psi_n: dimension mismatch");
  const int p = model.p();
  const std::size_t K = f.values.size() - 1;
  const Matrix& mt = model.derived().m_tilde;

  std::vector<Matrix> pows;
  pows.reserve(K + 1);
  pows.push_back(Matrix::identity(p));
  for (std::size_t k = 1; k <= K; ++k) pows.push_back(pows[k - 1] * mt);

  Vec drift_inc(p);
  for (int l = 0; l < p; ++l)
    drift_inc[l] = model.derived().m_alpha[l] / static_cast<double>(n);
  std::vector<Vec> inc(K + 1, Vec(p, 0.0));
  for (std::size_t j = 1; j <= K; ++j)
    for (int l = 0; l < p; ++l)
      inc[j][l] = f.values[j][l] - f.values[j - 1][l] + drift_inc[l];

  StepPath out;
  out.n = n;
  out.values.reserve(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    Vec v = pows[k] * f.values[0];
    for (std::size_t j = 1; j <= k; ++j) {
      Vec term = pows[k - j] * inc[j];
      for (int l = 0; l < p; ++l) v[l] += term[l];
    }
    out.values.push_back(std::move(v));
  }
  return out;
}

StepPath psi_limit(const StepPath& f, const ModelSpec& model) {
  if (f.values.empty()) throw ConfigError("psi_limit: empty path");
  if (f.p() != model.p()) throw ConfigError("psi_limit: dimension mismatch");
  CriticalityReport report = classify(model);
  if (!report.spectral)
    throw ConfigError("psi_limit: model has no valid dominant eigenpair (" + report.note + ")");
  const Matrix& pi = report.spectral->pi;
  const Vec& m_alpha = model.derived().m_alpha;
  const int p = model.p();

  StepPath out;
  out.n = f.n;
  out.values.reserve(f.values.size());
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(f.n);
    Vec shifted(p);
    for (int l = 0; l < p; ++l) shifted[l] = f.values[k][l] + t * m_alpha[l];
    out.values.push_back(pi * shifted);
  }
  return out;
}

StepPath v_n(const Trajectory& traj, int n, const ModelSpec& model) {
  if (n < 1) throw ConfigError("v_n: n must be >= 1");
  if (traj.steps.empty()) throw ConfigError("v_n: empty trajectory");
  const int p = model.p();
  const Matrix& mt = model.derived().m_tilde;
  const Matrix& m = model.derived().m;
  const double inv = 1.0 / static_cast<double>(n);

  StepPath out;
  out.n = n;
  out.values.reserve(traj.steps.size());
  Vec w(p, 0.0);
  out.values.push_back(w);
  for (std::size_t k = 1; k < traj.steps.size(); ++k) {
    Vec g = implied_g(model, traj.steps[k - 1]);
    Vec mg = m * g;
    Vec next = mt * w;
    for (int l = 0; l < p; ++l) next[l] += inv * mg[l];
    w = std::move(next);
    out.values.push_back(w);
  }
  return out;
}

}  // namespace cmbp
