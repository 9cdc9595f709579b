#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

#include "cmbp/errors.hpp"
#include "cmbp/matrix.hpp"
#include "cmbp/rng.hpp"

using cmbp::Matrix;
using cmbp::Vec;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd m(a.dim(), a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) m(i, j) = a.at(i, j);
  return m;
}

double eigen_spectral_radius(const Matrix& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a), false);
  double rho = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    rho = std::max(rho, std::abs(es.eigenvalues()[i]));
  return rho;
}

Matrix random_nonneg(int p, cmbp::RngStream& rng) {
  Matrix a(p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a.at(i, j) = rng.next_unit();
  return a;
}

}  // namespace

TEST_CASE("matrix basics") {
  Matrix a{{1.0, 2.0}, {3.0, 4.0}};
  CHECK(a.dim() == 2);
  CHECK(a.at(0, 1) == 2.0);
  Matrix t = a.transposed();
  CHECK(t.at(1, 0) == 2.0);
  Matrix id = Matrix::identity(2);
  Matrix prod = a * id;
  CHECK(prod.at(0, 0) == 1.0);
  CHECK(prod.at(1, 1) == 4.0);
  Vec x{1.0, 1.0};
  Vec ax = a * x;
  CHECK(ax[0] == doctest::Approx(3.0));
  CHECK(ax[1] == doctest::Approx(7.0));
  Vec xa = a.left_mul(x);
  CHECK(xa[0] == doctest::Approx(4.0));
  CHECK(xa[1] == doctest::Approx(6.0));
  Matrix outer = Matrix::outer({1.0, 2.0}, {3.0, 4.0});
  CHECK(outer.at(1, 0) == 6.0);
  CHECK(outer.at(0, 1) == 4.0);
}

TEST_CASE("gaussian solve against direct residual") {
  cmbp::RngStream rng = cmbp::RngStream::from_root(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 1 + static_cast<int>(rng.next_u64() % 4);
    Matrix a(p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) a.at(i, j) = 2.0 * rng.next_unit() - 1.0;
      a.at(i, i) += 3.0;  // diagonal dominance keeps the system well-posed
    }
    Vec b(p);
    for (int i = 0; i < p; ++i) b[i] = 2.0 * rng.next_unit() - 1.0;
    Vec x = cmbp::linalg_detail::solve(a, b);
    Vec r = a * x;
    for (int i = 0; i < p; ++i) CHECK(r[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }
}

TEST_CASE("eigenvalues of triangular and companion matrices") {
  // Triangular: eigenvalues sit on the diagonal.
  Matrix tri{{1.0, 5.0, 0.0}, {0.0, 2.0, 7.0}, {0.0, 0.0, 3.0}};
  auto eig = cmbp::linalg_detail::eigenvalues_small(tri);
  std::vector<double> re;
  for (auto& [r, i] : eig) {
    CHECK(std::abs(i) < 1e-9);
    re.push_back(r);
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(re[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(re[2] == doctest::Approx(3.0).epsilon(1e-10));

  // Rotation: a conjugate imaginary pair.
  Matrix rot{{0.0, -1.0}, {1.0, 0.0}};
  auto eig2 = cmbp::linalg_detail::eigenvalues_small(rot);
  std::sort(eig2.begin(), eig2.end(),
            [](auto& a, auto& b) { return a.second < b.second; });
  CHECK(eig2[0].first == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(eig2[0].second == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(eig2[1].second == doctest::Approx(1.0).epsilon(1e-10));

  // Companion matrix of (x-1)(x+1)(x-2)(x-1/2): roots recovered at p = 4.
  // Polynomial: x^4 - 2.5x^3 + 2.5x - 1 (the x^2 terms cancel).
  Matrix comp{{2.5, 0.0, -2.5, 1.0},
              {1.0, 0.0, 0.0, 0.0},
              {0.0, 1.0, 0.0, 0.0},
              {0.0, 0.0, 1.0, 0.0}};
  auto eig4 = cmbp::linalg_detail::eigenvalues_small(comp);
  std::vector<double> roots;
  for (auto& [r, i] : eig4) {
    CHECK(std::abs(i) < 1e-8);
    roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  CHECK(roots[0] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(roots[1] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(roots[2] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(roots[3] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("spectral radius matches a dense eigensolver") {
  cmbp::RngStream rng = cmbp::RngStream::from_root(12, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 1 + static_cast<int>(rng.next_u64() % 4);
    Matrix a = random_nonneg(p, rng);
    CHECK(cmbp::spectral_radius(a) == doctest::Approx(eigen_spectral_radius(a)).epsilon(1e-8));
  }
}

TEST_CASE("primitivity on zero patterns") {
  CHECK(cmbp::is_primitive(Matrix{{0.5, 0.5}, {0.5, 0.5}}));
  CHECK(cmbp::is_primitive(Matrix{{0.0, 1.0}, {1.0, 1.0}}));
  // Pure swap: period 2, never primitive.
  CHECK_FALSE(cmbp::is_primitive(Matrix{{0.0, 1.0}, {1.0, 0.0}}));
  // Reducible: second type feeds nothing back.
  CHECK_FALSE(cmbp::is_primitive(Matrix{{1.0, 0.0}, {1.0, 1.0}}));
  CHECK_THROWS_AS((void)cmbp::is_primitive(Matrix{{-0.1, 1.0}, {1.0, 0.0}}), cmbp::ConfigError);
}

TEST_CASE("perron frobenius on the doubly stochastic example") {
  Matrix a{{0.5, 0.5}, {0.5, 0.5}};
  cmbp::SpectralData sd = cmbp::perron_frobenius(a);
  CHECK(sd.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sd.u[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(sd.u[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(sd.v[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sd.v[1] == doctest::Approx(1.0).epsilon(1e-10));
  // pi = u v^T must be idempotent.
  Matrix pi2 = sd.pi * sd.pi;
  double diff = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) diff = std::max(diff, std::abs(pi2.at(i, j) - sd.pi.at(i, j)));
  CHECK(diff <= 1e-10);
  CHECK(sd.second_modulus == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("perron frobenius properties on random primitive matrices") {
  cmbp::RngStream rng = cmbp::RngStream::from_root(13, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + static_cast<int>(rng.next_u64() % 3);
    Matrix a = random_nonneg(p, rng);
    for (int i = 0; i < p; ++i) a.at(i, i) += 0.1;  // strictly positive enough to be primitive
    REQUIRE(cmbp::is_primitive(a));
    cmbp::SpectralData sd = cmbp::perron_frobenius(a);
    CHECK(sd.rho == doctest::Approx(eigen_spectral_radius(a)).epsilon(1e-8));
    double su = 0.0, vu = 0.0;
    for (int i = 0; i < p; ++i) {
      CHECK(sd.u[i] >= 0.0);
      CHECK(sd.v[i] >= 0.0);
      su += sd.u[i];
      vu += sd.v[i] * sd.u[i];
    }
    CHECK(su == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(vu == doctest::Approx(1.0).epsilon(1e-10));
    Vec au = a * sd.u;
    for (int i = 0; i < p; ++i)
      CHECK(au[i] == doctest::Approx(sd.rho * sd.u[i]).epsilon(1e-8).scale(1.0));
  }
  CHECK_THROWS_AS(cmbp::perron_frobenius(Matrix{{0.0, 1.0}, {1.0, 0.0}}), cmbp::ConfigError);
}

TEST_CASE("power decay toward the spectral projector") {
  // Eigenvalues 1 and 1/4: ||A^k - pi|| must shrink like (1/4)^k.
  Matrix a{{0.5, 0.5}, {0.25, 0.75}};
  cmbp::SpectralData sd = cmbp::perron_frobenius(a);
  CHECK(sd.rho == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sd.second_modulus == doctest::Approx(0.25).epsilon(1e-8));
  Vec decay = cmbp::power_decay(a, sd.pi, 12);
  REQUIRE(decay.size() == 12);
  CHECK(decay[0] <= 1.0);
  CHECK(decay[11] <= 1e-6);
  for (std::size_t k = 1; k < decay.size(); ++k)
    CHECK(decay[k] <= 0.3 * decay[k - 1] + 1e-14);

  // The doubly stochastic example collapses to pi in one step.
  Matrix b{{0.5, 0.5}, {0.5, 0.5}};
  cmbp::SpectralData sdb = cmbp::perron_frobenius(b);
  Vec decayb = cmbp::power_decay(b, sdb.pi, 5);
  for (double d : decayb) CHECK(d <= 1e-12);
}
