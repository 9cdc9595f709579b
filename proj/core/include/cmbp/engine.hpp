#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "cmbp/errors.hpp"
#include "cmbp/model.hpp"

namespace cmbp {

// Derivation lanes for per-step substreams. Every random decision in a
// trajectory is keyed by (lane, generation, type), so draws never depend on
// evaluation order and replays are exact.
namespace stream_lane {
inline constexpr std::uint64_t kInit = 0;       // initial state draw
inline constexpr std::uint64_t kControl = 1;    // control draw, keyed by generation
inline constexpr std::uint64_t kOffspring = 2;  // offspring sums, keyed by (generation, type)
inline constexpr std::uint64_t kDiffusion = 3;  // reserved for the SDE integrator
}  // namespace stream_lane

// One realized path Z_0..Z_K of population vectors.
struct Trajectory {
  int p = 0;
  std::vector<IVec> steps;
  std::uint64_t stream_id = 0;
};

// Stateful one-generation stepper. Owns its stream; advance() draws the
// control for the current state and then the per-type offspring sums.
// Throws OverflowError when a population coordinate leaves 64-bit range.
class Simulation {
 public:
  Simulation(const ModelSpec& model, std::uint64_t stream_id, std::uint64_t master_seed);

  const IVec& state() const { return z_; }
  std::int64_t generation() const { return gen_; }
  void advance();

 private:
  const ModelSpec* model_;
  RngStream base_;
  IVec z_;
  std::int64_t gen_ = 0;
};

Trajectory simulate_trajectory(const ModelSpec& model, std::int64_t K, std::uint64_t stream_id,
                               std::uint64_t master_seed);

// Streaming variant: visit(k, Z_k) for k = 0..K without storing the path.
template <typename Visitor>
void simulate_visit(const ModelSpec& model, std::int64_t K, std::uint64_t stream_id,
                    std::uint64_t master_seed, Visitor&& visit) {
  Simulation sim(model, stream_id, master_seed);
  visit(std::int64_t{0}, sim.state());
  for (std::int64_t k = 1; k <= K; ++k) {
    sim.advance();
    visit(k, sim.state());
  }
}

// M_k = Z_k - E[Z_k | Z_{k-1}] for k = 1..K; entry j holds M_{j+1}.
std::vector<Vec> martingale_differences(const Trajectory& traj, const ModelSpec& model);

// Piecewise-constant path: values[k] applies on [k/n, (k+1)/n).
struct StepPath {
  int n = 1;
  std::vector<Vec> values;

  int p() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
  std::size_t size() const { return values.size(); }
  const Vec& at_index(std::size_t k) const;
  // Evaluation at time t uses index floor(n*t); prefer at_index when t is
  // an exact lattice point.
  const Vec& at_time(double t) const;
};

// values[k] = Z_k / n.
StepPath scaled_path(const Trajectory& traj, int n);

// values[k] = (Z_0 + M_1 + ... + M_k) / n, the martingale step process.
StepPath martingale_step_path(const Trajectory& traj, const ModelSpec& model, int n);

// The discrete affine functional: out(k) = mt^k f(0)
//   + sum_{j=1..k} mt^{k-j} (f(j/n) - f((j-1)/n) + m alpha / n)
// with mt = m*lambda; matrix powers are computed once and cached.
StepPath psi_n(const StepPath& f, int n, const ModelSpec& model);

// Its scaling limit: out(k) = pi (f(k/n) + (k/n) m alpha).
StepPath psi_limit(const StepPath& f, const ModelSpec& model);

// Perturbation from the control residual:
// out(k) = n^-1 sum_{j=1..k} mt^{k-j} m g(Z_{j-1}).
StepPath v_n(const Trajectory& traj, int n, const ModelSpec& model);

// Bookkeeping for a Monte Carlo run: which trajectory streams aborted on
// population overflow (ascending ids, never silently dropped).
struct McOutcome {
  std::uint64_t requested = 0;
  std::vector<std::uint64_t> overflowed;

  bool overflowed_id(std::uint64_t id) const {
    return std::binary_search(overflowed.begin(), overflowed.end(), id);
  }
};

// Runs worker(id) for id = 0..count-1 across up to `threads` threads and
// returns the records indexed by id, so any later reduction is in
// ascending-id order no matter how the work was scheduled. The worker must
// be safe to invoke concurrently (all state local to the call).
// OverflowError from a worker marks the id in outcome->overflowed and
// leaves a default-constructed record; other exceptions are rethrown
// (lowest id wins) after all threads join.
template <typename Worker>
auto parallel_map_ordered(std::uint64_t count, int threads, Worker worker,
                          McOutcome* outcome = nullptr)
    -> std::vector<std::invoke_result_t<Worker&, std::uint64_t>> {
  using Record = std::invoke_result_t<Worker&, std::uint64_t>;
  std::vector<Record> records(count);
  McOutcome local;
  McOutcome& out = outcome ? *outcome : local;
  out.requested = count;
  out.overflowed.clear();

  std::mutex mu;
  std::uint64_t first_error_id = count;
  std::exception_ptr error;

  auto run_one = [&](std::uint64_t id) {
    try {
      records[id] = worker(id);
    } catch (const OverflowError&) {
      std::lock_guard<std::mutex> lock(mu);
      out.overflowed.push_back(id);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (id < first_error_id) {
        first_error_id = id;
        error = std::current_exception();
      }
    }
  };

  const int workers =
      static_cast<int>(std::min<std::uint64_t>(std::max(threads, 1), std::max<std::uint64_t>(count, 1)));
  if (workers <= 1) {
    for (std::uint64_t id = 0; id < count; ++id) run_one(id);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          std::uint64_t id = next.fetch_add(1);
          if (id >= count) break;
          run_one(id);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  if (error) std::rethrow_exception(error);
  std::sort(out.overflowed.begin(), out.overflowed.end());
  return records;
}

template <typename Record>
struct McResult {
  std::vector<Record> records;  // indexed by stream id; overflowed ids hold defaults
  McOutcome outcome;
};

// N independent trajectories of ceil(n*T) generations with stream ids
// 0..N-1; map(trajectory) -> record. Records come back in stream-id order,
// so folds over them are bit-identical at any thread count.
template <typename Map>
auto monte_carlo(const ModelSpec& model, int n, double T, std::uint64_t trajectories,
                 std::uint64_t master_seed, Map map, int threads = 1)
    -> McResult<std::invoke_result_t<Map&, const Trajectory&>> {
  using Record = std::invoke_result_t<Map&, const Trajectory&>;
  if (trajectories < 1) throw ConfigError("monte_carlo: need at least one trajectory");
  if (n < 1 || T < 0.0) throw ConfigError("monte_carlo: invalid scaling parameters");
  const auto K = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) * T));
  McResult<Record> result;
  result.records = parallel_map_ordered(
      trajectories, threads,
      [&](std::uint64_t id) -> Record {
        Trajectory traj = simulate_trajectory(model, K, id, master_seed);
        return map(static_cast<const Trajectory&>(traj));
      },
      &result.outcome);
  return result;
}

}  // namespace cmbp
