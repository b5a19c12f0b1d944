#pragma once

#include <random>

#include "nrange/linalg.hpp"

namespace testing {

using nrange::Complex;
using nrange::Matrix;
using nrange::Real;
using nrange::Vector;

inline Matrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<Real> g(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Real re = g(rng);
      const Real im = g(rng);
      a(i, j) = Complex(re, im);
    }
  return a;
}

inline Matrix random_unitary(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, rng));
  return qr.householderQ() * Matrix::Identity(n, n);
}

inline Matrix random_normal(int n, std::mt19937_64& rng, Vector* eigenvalues = nullptr) {
  std::normal_distribution<Real> g(0.0, 1.0);
  Vector d(n);
  for (int i = 0; i < n; ++i) {
    const Real re = g(rng);
    const Real im = g(rng);
    d(i) = Complex(re, im);
  }
  if (eigenvalues) *eigenvalues = d;
  const Matrix u = random_unitary(n, rng);
  return u * d.asDiagonal() * u.adjoint();
}

inline Matrix nilpotent2() {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  return a;
}

inline Matrix square4() {
  Matrix a = Matrix::Zero(4, 4);
  a(0, 0) = 1.0;
  a(1, 1) = Complex(0, 1);
  a(2, 2) = -1.0;
  a(3, 3) = Complex(0, -1);
  return a;
}

inline Matrix diag(std::initializer_list<Complex> v) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (Complex c : v) a(i, i) = c, ++i;
  return a;
}

}  // namespace testing
