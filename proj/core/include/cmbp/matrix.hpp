#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace cmbp {

using Vec = std::vector<double>;

// Dense p x p real matrix, row-major. p stays tiny (types of a branching
// process), so everything is plain loops; no attempt at blocking or SIMD.
class Matrix {
 public:
  Matrix() : p_(0) {}
  explicit Matrix(int p, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(int p);
  static Matrix outer(const Vec& u, const Vec& v);

  int dim() const { return p_; }
  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * p_ + j]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * p_ + j]; }

  Matrix transposed() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(double c) const;

  Vec operator*(const Vec& x) const;   // A x
  Vec left_mul(const Vec& x) const;    // A^T x, i.e. x^T A as a column

  bool all_finite() const;
  double max_abs() const;

 private:
  int p_;
  std::vector<double> a_;
};

// Spectral summary of m~ under the sum-to-1 / v^T u = 1 normalization.
struct SpectralData {
  double rho = 0.0;        // dominant eigenvalue (Perron-Frobenius root)
  Vec u;                   // right eigenvector, nonnegative, coordinates sum to 1
  Vec v;                   // left eigenvector, nonnegative, v^T u = 1
  Matrix pi;               // u v^T, the limit of A^k when rho = 1
  double second_modulus = 0.0;  // max modulus among the remaining eigenvalues
};

// True iff A^k is entrywise positive for k = (p-1)^2 + 1, evaluated on the
// boolean zero-pattern (no overflow, no rounding). Rejects negative entries.
bool is_primitive(const Matrix& A);

// Dominant eigen-structure of a primitive nonnegative matrix.
// Throws NumericError when iteration fails to converge (ill-conditioned
// input) and ConfigError when A is not primitive.
SpectralData perron_frobenius(const Matrix& A);

// Max modulus over all eigenvalues. Characteristic-polynomial roots for
// p <= 4, power iteration beyond that.
double spectral_radius(const Matrix& A);

// ||A^k - pi|| in the operator 2-norm for k = 1..k_max.
Vec power_decay(const Matrix& A, const Matrix& pi, int k_max);

namespace linalg_detail {

// Largest dimension handled by the characteristic-polynomial eigen path.
inline constexpr int kCharPolyMaxDim = 4;

// All eigenvalues as (re, im) pairs; char-poly + Durand-Kerner, p <= 4 only.
std::vector<std::pair<double, double>> eigenvalues_small(const Matrix& A);

// Solve A x = b by Gaussian elimination with partial pivoting.
Vec solve(Matrix A, Vec b);

// Unit eigenvector of A for (approximately) known real eigenvalue lambda,
// via shifted inverse iteration. Sign fixed so the first nonzero
// coordinate is positive.
Vec eigenvector_for(const Matrix& A, double lambda);

double norm2(const Vec& x);
double operator_norm2(const Matrix& A);

}  // namespace linalg_detail

}  // namespace cmbp
