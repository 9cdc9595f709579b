#include "cmbp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>

#include "cmbp/errors.hpp"
#include "cmbp/rng.hpp"

namespace cmbp {

namespace {

using linalg_detail::kCharPolyMaxDim;

constexpr double kEigTol = 1e-12;
constexpr int kPowerIterCap = 100000;

}  // namespace

Matrix::Matrix(int p, double fill) : p_(p), a_(static_cast<std::size_t>(p) * p, fill) {
  if (p < 1) throw ConfigError("Matrix: dimension must be >= 1");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  p_ = static_cast<int>(rows.size());
  if (p_ < 1) throw ConfigError("Matrix: dimension must be >= 1");
  a_.reserve(static_cast<std::size_t>(p_) * p_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != p_) throw ConfigError("Matrix: ragged initializer");
    for (double x : r) a_.push_back(x);
  }
}

Matrix Matrix::identity(int p) {
  Matrix m(p);
  for (int i = 0; i < p; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::outer(const Vec& u, const Vec& v) {
  Matrix m(static_cast<int>(u.size()));
  if (u.size() != v.size()) throw ConfigError("Matrix::outer: size mismatch");
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) m.at(i, j) = u[i] * v[j];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(p_);
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) t.at(j, i) = at(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (p_ != rhs.p_) throw ConfigError("Matrix multiply: dimension mismatch");
  Matrix out(p_);
  for (int i = 0; i < p_; ++i)
    for (int k = 0; k < p_; ++k) {
      double aik = at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < p_; ++j) out.at(i, j) += aik * rhs.at(k, j);
    }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (p_ != rhs.p_) throw ConfigError("Matrix add: dimension mismatch");
  Matrix out(p_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + rhs.a_[i];
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  if (p_ != rhs.p_) throw ConfigError("Matrix subtract: dimension mismatch");
  Matrix out(p_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - rhs.a_[i];
  return out;
}

Matrix Matrix::scaled(double c) const {
  Matrix out(p_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * c;
  return out;
}

Vec Matrix::operator*(const Vec& x) const {
  if (static_cast<int>(x.size()) != p_) throw ConfigError("Matrix*Vec: dimension mismatch");
  Vec y(p_, 0.0);
  for (int i = 0; i < p_; ++i) {
    double s = 0.0;
    for (int j = 0; j < p_; ++j) s += at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vec Matrix::left_mul(const Vec& x) const {
  if (static_cast<int>(x.size()) != p_) throw ConfigError("Matrix::left_mul: dimension mismatch");
  Vec y(p_, 0.0);
  for (int i = 0; i < p_; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    for (int j = 0; j < p_; ++j) y[j] += xi * at(i, j);
  }
  return y;
}

bool Matrix::all_finite() const {
  for (double x : a_)
    if (!std::isfinite(x)) return false;
  return true;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : a_) m = std::max(m, std::abs(x));
  return m;
}

bool is_primitive(const Matrix& A) {
  const int p = A.dim();
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (A.at(i, j) < 0.0) throw ConfigError("is_primitive: negative entry");

  // Work on the zero pattern only; (p-1)^2 + 1 is the Wielandt exponent,
  // the worst-case power at which a primitive pattern must be full.
  std::vector<char> pat(static_cast<std::size_t>(p) * p), acc, nxt;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) pat[static_cast<std::size_t>(i) * p + j] = A.at(i, j) > 0.0;
  acc = pat;
  const long long target = static_cast<long long>(p - 1) * (p - 1) + 1;
  for (long long k = 1; k < target; ++k) {
    nxt.assign(static_cast<std::size_t>(p) * p, 0);
    for (int i = 0; i < p; ++i)
      for (int l = 0; l < p; ++l) {
        if (!acc[static_cast<std::size_t>(i) * p + l]) continue;
        for (int j = 0; j < p; ++j)
          if (pat[static_cast<std::size_t>(l) * p + j]) nxt[static_cast<std::size_t>(i) * p + j] = 1;
      }
    acc.swap(nxt);
  }
  for (char c : acc)
    if (!c) return false;
  return true;
}

namespace linalg_detail {

double norm2(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Vec solve(Matrix A, Vec b) {
  const int p = A.dim();
  if (static_cast<int>(b.size()) != p) throw ConfigError("solve: dimension mismatch");
  std::vector<int> piv(p);
  for (int i = 0; i < p; ++i) piv[i] = i;
  for (int col = 0; col < p; ++col) {
    int best = col;
    for (int r = col + 1; r < p; ++r)
      if (std::abs(A.at(r, col)) > std::abs(A.at(best, col))) best = r;
    if (best != col) {
      for (int j = 0; j < p; ++j) std::swap(A.at(col, j), A.at(best, j));
      std::swap(b[col], b[best]);
    }
    double d = A.at(col, col);
    if (std::abs(d) < 1e-300) throw NumericError("solve: singular matrix");
    for (int r = col + 1; r < p; ++r) {
      double f = A.at(r, col) / d;
      if (f == 0.0) continue;
      A.at(r, col) = 0.0;
      for (int j = col + 1; j < p; ++j) A.at(r, j) -= f * A.at(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(p, 0.0);
  for (int i = p - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < p; ++j) s -= A.at(i, j) * x[j];
    x[i] = s / A.at(i, i);
  }
  return x;
}

// Coefficients c[0..p] of det(lambda I - A) = sum c[k] lambda^(p-k),
// c[0] = 1, by the Faddeev-LeVerrier recurrence.
static std::vector<double> char_poly(const Matrix& A) {
  const int p = A.dim();
  std::vector<double> c(p + 1, 0.0);
  c[0] = 1.0;
  Matrix M = Matrix::identity(p);
  for (int k = 1; k <= p; ++k) {
    M = A * M;
    double tr = 0.0;
    for (int i = 0; i < p; ++i) tr += M.at(i, i);
    c[k] = -tr / k;
    for (int i = 0; i < p; ++i) M.at(i, i) += c[k];
  }
  return c;
}

// Durand-Kerner simultaneous root iteration on the monic polynomial.
static std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<std::complex<double>> z(n);
  std::complex<double> seed(0.4, 0.9);
  std::complex<double> w(1.0, 0.0);
  double scale = 1.0;
  for (int k = 1; k <= n; ++k) scale = std::max(scale, std::pow(std::abs(c[k]), 1.0 / k));
  for (int j = 0; j < n; ++j) {
    w *= seed;
    z[j] = scale * w;
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> v(c[0], 0.0);
    for (int k = 1; k <= n; ++k) v = v * x + c[k];
    return v;
  };
  for (int it = 0; it < 1000; ++it) {
    double delta = 0.0;
    for (int j = 0; j < n; ++j) {
      std::complex<double> den(1.0, 0.0);
      for (int l = 0; l < n; ++l)
        if (l != j) den *= (z[j] - z[l]);
      if (std::abs(den) < 1e-300) den = 1e-300;
      std::complex<double> step = eval(z[j]) / den;
      z[j] -= step;
      delta = std::max(delta, std::abs(step));
    }
    if (delta < 1e-14 * std::max(1.0, scale)) break;
  }
  return z;
}

std::vector<std::pair<double, double>> eigenvalues_small(const Matrix& A) {
  auto roots = poly_roots(char_poly(A));
  std::vector<std::pair<double, double>> out;
  out.reserve(roots.size());
  for (const auto& r : roots) out.emplace_back(r.real(), r.imag());
  return out;
}

Vec eigenvector_for(const Matrix& A, double lambda) {
  const int p = A.dim();
  // Shifted inverse iteration; the tiny off-eigenvalue shift keeps the
  // solve nonsingular when lambda is (numerically) exact.
  Matrix B = A;
  double shift = lambda + 1e-10 * std::max(1.0, std::abs(lambda));
  for (int i = 0; i < p; ++i) B.at(i, i) -= shift;
  RngStream rng = RngStream::from_root(0x65696776ULL, static_cast<std::uint64_t>(p));
  Vec x(p);
  for (int i = 0; i < p; ++i) x[i] = 0.5 + rng.next_unit();
  double nrm = norm2(x);
  for (int i = 0; i < p; ++i) x[i] /= nrm;
  Vec best = x;
  double best_res = 1e300;
  for (int it = 0; it < 200; ++it) {
    Vec y;
    try {
      y = solve(B, x);
    } catch (const NumericError&) {
      // Singular shifted system: perturb the shift slightly and go on.
      for (int i = 0; i < p; ++i) B.at(i, i) -= 1e-9;
      continue;
    }
    nrm = norm2(y);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
    for (int i = 0; i < p; ++i) y[i] /= nrm;
    Vec Ay = A * y;
    double res = 0.0;
    for (int i = 0; i < p; ++i) res = std::max(res, std::abs(Ay[i] - lambda * y[i]));
    if (res < best_res) {
      best_res = res;
      best = y;
    }
    double move = 0.0;
    for (int i = 0; i < p; ++i) move = std::max(move, std::abs(std::abs(y[i]) - std::abs(x[i])));
    x = y;
    if (res < 1e-13 && move < 1e-13) break;
  }
  // Deterministic sign: first nonzero coordinate positive.
  for (int i = 0; i < p; ++i) {
    if (std::abs(best[i]) > 1e-12) {
      if (best[i] < 0.0)
        for (int j = 0; j < p; ++j) best[j] = -best[j];
      break;
    }
  }
  return best;
}

double operator_norm2(const Matrix& A) {
  // sqrt of the dominant eigenvalue of A^T A (symmetric PSD, so plain
  // power iteration converges; ties across equal singular values are fine
  // for a norm).
  const int p = A.dim();
  Matrix G = A.transposed() * A;
  RngStream rng = RngStream::from_root(0x6e6f726dULL, static_cast<std::uint64_t>(p));
  Vec x(p);
  for (int i = 0; i < p; ++i) x[i] = 0.5 + rng.next_unit();
  double lam = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vec y = G * x;
    double n = norm2(y);
    if (n == 0.0) return 0.0;
    for (int i = 0; i < p; ++i) y[i] /= n;
    double new_lam = 0.0;
    Vec Gy = G * y;
    for (int i = 0; i < p; ++i) new_lam += y[i] * Gy[i];
    x = y;
    if (std::abs(new_lam - lam) <= 1e-14 * std::max(1.0, new_lam) && it > 2) {
      lam = new_lam;
      break;
    }
    lam = new_lam;
  }
  return std::sqrt(std::max(0.0, lam));
}

// Dominant eigenvalue + eigenvector by power iteration with
// Rayleigh-quotient stopping. Used for p above the char-poly cutoff.
static std::pair<double, Vec> power_dominant(const Matrix& A) {
  const int p = A.dim();
  RngStream rng = RngStream::from_root(0x706f7765ULL, static_cast<std::uint64_t>(p));
  Vec x(p);
  for (int i = 0; i < p; ++i) x[i] = 0.5 + rng.next_unit();
  double n = norm2(x);
  for (int i = 0; i < p; ++i) x[i] /= n;
  double lam = 0.0;
  for (int it = 0; it < kPowerIterCap; ++it) {
    Vec y = A * x;
    double ny = norm2(y);
    if (ny == 0.0) return {0.0, x};
    for (int i = 0; i < p; ++i) y[i] /= ny;
    double rq = 0.0;
    Vec Ay = A * y;
    for (int i = 0; i < p; ++i) rq += y[i] * Ay[i];
    double diff = std::abs(rq - lam);
    x = y;
    lam = rq;
    if (diff <= kEigTol * std::max(1.0, std::abs(rq)) && it > 4) return {lam, x};
  }
  throw NumericError("power iteration did not converge within 1e5 steps");
}

}  // namespace linalg_detail

double spectral_radius(const Matrix& A) {
  if (!A.all_finite()) throw ConfigError("spectral_radius: non-finite entry");
  if (A.dim() <= kCharPolyMaxDim) {
    double r = 0.0;
    for (const auto& [re, im] : linalg_detail::eigenvalues_small(A))
      r = std::max(r, std::hypot(re, im));
    return r;
  }
  auto [lam, vec] = linalg_detail::power_dominant(A);
  (void)vec;
  return std::abs(lam);
}

SpectralData perron_frobenius(const Matrix& A) {
  if (!is_primitive(A)) throw ConfigError("perron_frobenius: matrix is not primitive");
  const int p = A.dim();
  SpectralData sd;

  double rho;
  if (p <= kCharPolyMaxDim) {
    rho = 0.0;
    for (const auto& [re, im] : linalg_detail::eigenvalues_small(A))
      rho = std::max(rho, std::hypot(re, im));
  } else {
    rho = std::abs(linalg_detail::power_dominant(A).first);
  }
  sd.rho = rho;

  Vec u = linalg_detail::eigenvector_for(A, rho);
  Vec v = linalg_detail::eigenvector_for(A.transposed(), rho);

  // Hypothesis-style normalization: u >= 0 with coordinates summing to 1,
  // then v scaled so v^T u = 1.
  double su = 0.0;
  for (double& ui : u) {
    if (ui < 0.0) {
      if (ui < -1e-9) throw NumericError("perron_frobenius: right eigenvector has a negative coordinate");
      ui = 0.0;
    }
    su += ui;
  }
  if (su <= 0.0) throw NumericError("perron_frobenius: degenerate right eigenvector");
  for (double& ui : u) ui /= su;

  double vu = 0.0;
  for (int i = 0; i < p; ++i) {
    if (v[i] < 0.0) {
      if (v[i] < -1e-9) throw NumericError("perron_frobenius: left eigenvector has a negative coordinate");
      v[i] = 0.0;
    }
    vu += v[i] * u[i];
  }
  if (std::abs(vu) < 1e-300) throw NumericError("perron_frobenius: v^T u vanishes");
  for (double& vi : v) vi /= vu;

  sd.u = u;
  sd.v = v;
  sd.pi = Matrix::outer(u, v);

  if (p <= kCharPolyMaxDim) {
    // Second modulus straight from the root multiset (one dominant copy
    // removed).
    auto ev = linalg_detail::eigenvalues_small(A);
    double second = 0.0;
    int dominant_left = 1;
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
      return std::hypot(a.first, a.second) > std::hypot(b.first, b.second);
    });
    for (const auto& [re, im] : ev) {
      double mod = std::hypot(re, im);
      if (dominant_left > 0 && std::abs(mod - rho) <= 1e-8 * std::max(1.0, rho) && std::abs(im) <= 1e-8 * std::max(1.0, rho)) {
        --dominant_left;
        continue;
      }
      second = std::max(second, mod);
    }
    sd.second_modulus = second;
  } else {
    // Deflate the dominant pair; B = A - rho u v^T has the remaining
    // spectrum of A.
    Matrix B = A - sd.pi.scaled(rho);
    try {
      sd.second_modulus = std::abs(linalg_detail::power_dominant(B).first);
    } catch (const NumericError&) {
      sd.second_modulus = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return sd;
}

Vec power_decay(const Matrix& A, const Matrix& pi, int k_max) {
  if (k_max < 1) throw ConfigError("power_decay: k_max must be >= 1");
  if (A.dim() != pi.dim()) throw ConfigError("power_decay: dimension mismatch");
  Vec out;
  out.reserve(k_max);
  Matrix Ak = A;
  for (int k = 1; k <= k_max; ++k) {
    out.push_back(linalg_detail::operator_norm2(Ak - pi));
    if (k < k_max) Ak = Ak * A;
  }
  return out;
}

}  // namespace cmbp
