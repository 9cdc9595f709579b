#pragma once

// Shared utilities for the test binaries: small statistics accumulators, a
// seeded random-model generator, and a subprocess runner for CLI tests.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cmbp/control.hpp"
#include "cmbp/laws.hpp"
#include "cmbp/matrix.hpp"
#include "cmbp/model.hpp"
#include "cmbp/rng.hpp"

namespace testutil {

struct MeanVar {
  std::uint64_t n = 0;
  double mu = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mu;
    mu += d / static_cast<double>(n);
    m2 += d * (x - mu);
  }
  double mean() const { return mu; }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double se_mean() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline cmbp::Vec to_vec(const cmbp::IVec& z) {
  cmbp::Vec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(z[i]);
  return out;
}

// --- canned laws ------------------------------------------------------

inline cmbp::DiscreteLaw poisson_pair(double a, double b) {
  return cmbp::DiscreteLaw::poisson(cmbp::Vec{a, b});
}

// Immigration law for the promiscuous preset: Poisson females, one male.
inline cmbp::DiscreteLaw poisson_female_one_male(double rate) {
  return cmbp::DiscreteLaw::product(
      {cmbp::DiscreteLaw::poisson1(rate), cmbp::DiscreteLaw::deterministic1(1)});
}

// --- random model generator -------------------------------------------

// Random offspring law on Z_+^p with coordinate means <= about 1.2, mixing
// the available kinds. Used for identity and property tests where only
// validity matters, not criticality.
inline cmbp::DiscreteLaw random_offspring_law(int p, cmbp::RngStream& rng) {
  const int kind = static_cast<int>(rng.next_u64() % 5);
  switch (kind) {
    case 0: {
      cmbp::IVec point(p);
      for (int i = 0; i < p; ++i) point[i] = static_cast<std::int64_t>(rng.next_u64() % 2);
      return cmbp::DiscreteLaw::deterministic(std::move(point));
    }
    case 1: {
      // Two-point table; probabilities in sixteenths for exact sums.
      const int w = 1 + static_cast<int>(rng.next_u64() % 15);
      cmbp::IVec a(p), b(p);
      for (int i = 0; i < p; ++i) {
        a[i] = static_cast<std::int64_t>(rng.next_u64() % 3);
        b[i] = static_cast<std::int64_t>(rng.next_u64() % 2);
      }
      return cmbp::DiscreteLaw::table({std::move(a), std::move(b)},
                                      {w / 16.0, (16 - w) / 16.0});
    }
    case 2: {
      cmbp::Vec rates(p);
      for (int i = 0; i < p; ++i) rates[i] = 0.1 + rng.next_unit();
      return cmbp::DiscreteLaw::poisson(std::move(rates));
    }
    case 3: {
      cmbp::IVec point(p);
      for (int i = 0; i < p; ++i) point[i] = 1 + static_cast<std::int64_t>(rng.next_u64() % 2);
      return cmbp::DiscreteLaw::bernoulli_vector(std::move(point), 0.25 + 0.5 * rng.next_unit());
    }
    default: {
      std::vector<cmbp::DiscreteLaw> comps;
      comps.reserve(p);
      for (int i = 0; i < p; ++i) comps.push_back(cmbp::DiscreteLaw::poisson1(rng.next_unit()));
      return cmbp::DiscreteLaw::product(std::move(comps));
    }
  }
}

// Random model with a mixed-kind control and its honest (lambda, alpha)
// declaration. Spectral radius of m * lambda is kept at or below ~1.05 so
// trajectories stay desk-scale.
inline cmbp::ModelSpec random_model(cmbp::RngStream& rng) {
  for (;;) {
    const int p = 1 + static_cast<int>(rng.next_u64() % 3);
    std::vector<cmbp::DiscreteLaw> offspring;
    offspring.reserve(p);
    for (int i = 0; i < p; ++i) offspring.push_back(random_offspring_law(p, rng));

    cmbp::Matrix lambda = cmbp::Matrix::identity(p);
    cmbp::Vec alpha(p, 0.0);
    cmbp::ControlLaw control = cmbp::ControlLaw::identity(p);
    const int ck = static_cast<int>(rng.next_u64() % 4);
    if (ck == 1) {
      // Migration with signed steps; the declared decomposition carries a
      // nonzero residual g on the boundary states.
      std::vector<cmbp::DiscreteLaw> steps;
      steps.reserve(p);
      for (int i = 0; i < p; ++i) {
        const double w = rng.next_unit();
        steps.push_back(cmbp::DiscreteLaw::table1({-1, 0, 1}, {w / 2, 0.5, (1 - w) / 2}));
        alpha[i] = (1 - w) / 2 - w / 2;
      }
      control = cmbp::ControlLaw::migration(std::move(steps));
    } else if (ck == 2) {
      cmbp::Vec rates(p);
      for (int i = 0; i < p; ++i) {
        rates[i] = rng.next_unit();
        alpha[i] = rates[i];
      }
      control = cmbp::ControlLaw::immigration(cmbp::DiscreteLaw::poisson(std::move(rates)));
    } else if (ck == 3 && p == 2) {
      control = cmbp::ControlLaw::mating_selffert();
      lambda = cmbp::Matrix{{1.0, 1.0}, {0.0, 0.0}};
      alpha = {0.0, 1.0};
    }

    cmbp::IVec z0(p);
    for (int i = 0; i < p; ++i) z0[i] = static_cast<std::int64_t>(rng.next_u64() % 3);
    cmbp::ModelSpec model(p, std::move(offspring), std::move(control), std::move(lambda),
                          std::move(alpha), cmbp::DiscreteLaw::deterministic(std::move(z0)));
    if (cmbp::spectral_radius(model.derived().m_tilde) <= 1.05) return model;
  }
}

// --- subprocess runner -------------------------------------------------

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs a shell command, capturing stdout; stderr goes to /dev/null unless
// the command redirects it.
inline RunResult run_command(const std::string& cmd) {
  RunResult res;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return res;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) res.out.append(buf, got);
  const int status = pclose(pipe);
  res.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return res;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

}  // namespace testutil
