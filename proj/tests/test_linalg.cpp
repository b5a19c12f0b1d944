#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

using namespace nrange;
using namespace testing;

TEST_CASE("cartesian parts of simple matrices") {
  const Matrix id = Matrix::Identity(2, 2);
  CHECK((cartesian_part(id, 0.0, Part::Real) - id).norm() < 1e-15);

  const Matrix re = cartesian_part(nilpotent2(), 0.0, Part::Real);
  CHECK(std::abs(re(0, 1) - Complex(0.5, 0)) < 1e-15);
  CHECK(std::abs(re(1, 0) - Complex(0.5, 0)) < 1e-15);
  CHECK(std::abs(re(0, 0)) < 1e-15);
}

TEST_CASE("cartesian decomposition and derivative identity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(5, rng);
    const Real f = a.norm();
    const Real theta = 0.37 * trial;
    const Matrix re = cartesian_part(a, theta, Part::Real);
    const Matrix im = cartesian_part(a, theta, Part::Imaginary);
    const Matrix rot = std::polar(1.0, -theta) * a;
    CHECK((re + kI * im - rot).cwiseAbs().maxCoeff() <= 1e-13 * f);
    CHECK((re - re.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * f);
    CHECK((im - im.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * f);

    const Real hh = 1e-5;
    const Matrix fd = (cartesian_part(a, theta + hh, Part::Real) - cartesian_part(a, theta - hh, Part::Real)) / (2 * hh);
    CHECK((fd - im).cwiseAbs().maxCoeff() <= 1e-8 * f);
  }
}

TEST_CASE("hermitian_eig contract") {
  const SpectralDecomposition d = hermitian_eig(diag({3.0, -1.0}));
  CHECK(d.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(d.eigenvalues(1) == doctest::Approx(3.0));
  CHECK(std::abs(d.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(d.eigenvectors(0, 1)) == doctest::Approx(1.0));

  Matrix swap = Matrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  const SpectralDecomposition s = hermitian_eig(swap);
  CHECK(s.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(s.eigenvalues(1) == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix b = random_matrix(8, rng);
    const Matrix h = (b + b.adjoint()) * 0.5;
    const SpectralDecomposition e = hermitian_eig(h);
    for (int j = 0; j < 8; ++j) {
      CHECK((h * e.eigenvectors.col(j) - e.eigenvalues(j) * e.eigenvectors.col(j)).norm() <= 1e-9);
      if (j > 0) CHECK(e.eigenvalues(j) >= e.eigenvalues(j - 1));
    }
    const Matrix gram = e.eigenvectors.adjoint() * e.eigenvectors;
    CHECK((gram - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(std::abs(e.eigenvalues.sum() - h.trace().real()) <= 1e-9 * (1 + h.norm()));
    CHECK(e.residual <= 1e-9 * (1 + h.norm()));

    const SpectralDecomposition again = hermitian_eig(h);
    CHECK((again.eigenvectors - e.eigenvectors).norm() == 0.0);
  }
}

TEST_CASE("phase fixing makes the largest entry real positive") {
  Vector v(3);
  v << Complex(0.1, 0.2), Complex(0, -2), Complex(1, 1);
  fix_phase(v);
  CHECK(std::abs(v(1).imag()) < 1e-15);
  CHECK(v(1).real() > 0);

  Vector tie(2);
  tie << Complex(0, 1), Complex(-1, 0);
  fix_phase(tie);
  CHECK(tie(0).real() == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig symmetrizes slightly non-Hermitian input") {
  Matrix h = diag({1.0, 2.0});
  h(0, 1) = 1e-6;
  const SpectralDecomposition d = hermitian_eig(h);
  CHECK(d.hermitian_defect == doctest::Approx(1e-6));
  CHECK(d.residual < 1e-12);
}

TEST_CASE("range map values") {
  const Matrix id = Matrix::Identity(3, 3);
  std::mt19937_64 rng(1);
  for (const auto& x : sample_sphere(3, 9, 5)) CHECK(std::abs(evaluate_range_map(id, x) - 1.0) < 1e-14);

  Vector x(2);
  x << 1.0, 1.0;
  CHECK(std::abs(evaluate_range_map(nilpotent2(), UnitVector::normalize(x)) - 0.5) < 1e-15);

  CHECK_THROWS_AS(evaluate_range_map(id, UnitVector::normalize(x)), DimensionMismatch);
}

TEST_CASE("compressions") {
  std::mt19937_64 rng(3);
  const Matrix a = random_matrix(4, rng);
  std::vector<UnitVector> basis;
  for (int i = 0; i < 4; ++i) basis.push_back(UnitVector::normalize(Vector::Unit(4, i)));
  CHECK((compress(a, basis) - a).norm() < 1e-14);

  const Matrix d = diag({1.0, 2.0, 3.0});
  std::vector<UnitVector> b13{UnitVector::normalize(Vector::Unit(3, 0)), UnitVector::normalize(Vector::Unit(3, 2))};
  const Matrix c = compress(d, b13);
  CHECK(std::abs(c(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(c(1, 1) - 3.0) < 1e-15);
  CHECK(std::abs(c(0, 1)) < 1e-15);

  std::vector<UnitVector> bad{UnitVector::normalize(Vector::Unit(3, 0)), UnitVector::normalize(Vector::Ones(3))};
  CHECK_THROWS_AS(compress(d, bad), BasisNotOrthonormal);

  // f_A(v) equals the quadratic form of the 2x2 compression for v in the span.
  const Matrix a6 = random_matrix(6, rng);
  const Matrix q = random_unitary(6, rng).leftCols(2);
  const Matrix a2 = compress(a6, q);
  const Matrix h = (a6 + a6.adjoint()) * 0.5;
  const Matrix h2 = compress(h, q);
  CHECK((h2 - h2.adjoint()).norm() < 1e-14);
  for (const auto& u : sample_sphere(2, 77, 100)) {
    const Vector lift = q * u.components;
    const Matrix uu = u.components * u.components.adjoint();
    CHECK(std::abs(range_map(a6, lift) - range_map(a2, u.components)) <= 1e-12);
    CHECK(std::abs(range_map(a6, lift) - (a2 * uu).trace()) <= 1e-12);
  }
}

TEST_CASE("sphere sampling") {
  const auto scalars = sample_sphere(1, 4, 3);
  CHECK(scalars.size() == 3);
  for (const auto& s : scalars) CHECK(std::abs(std::abs(s.components(0)) - 1.0) < 1e-15);

  for (const auto& x : sample_sphere(4, 42, 1000)) CHECK(std::abs(x.components.norm() - 1.0) <= 1e-12);

  Real mean = 0.0;
  const auto xs = sample_sphere(3, 7, 10000);
  for (const auto& x : xs) mean += std::norm(x.components(0));
  mean /= xs.size();
  CHECK(std::abs(mean - 1.0 / 3.0) <= 3e-2);

  const auto again = sample_sphere(3, 7, 10);
  for (int i = 0; i < 10; ++i) CHECK((again[i].components - xs[i].components).norm() == 0.0);
}

TEST_CASE("cap sampling") {
  const UnitVector e1 = UnitVector::normalize(Vector::Unit(2, 0));
  for (const auto& y : sample_cap(e1, 2.0, 3, 200)) CHECK((y.components - e1.components).norm() < 2.0);
  for (const auto& y : sample_cap(e1, 0.1, 3, 100)) CHECK((y.components - e1.components).norm() < 0.1);

  Real worst = 0.0;
  for (const auto& y : sample_cap(e1, 0.5, 8, 10000)) worst = std::max(worst, (y.components - e1.components).norm());
  CHECK(worst >= 0.45);
  CHECK(worst < 0.5);
}

TEST_CASE("normality and norms") {
  CHECK(is_normal(square4()));
  CHECK_FALSE(is_normal(nilpotent2()));
  CHECK(spectral_norm(nilpotent2()) == doctest::Approx(1.0));
  CHECK_THROWS_AS(validate_square(Matrix(2, 3)), InvalidInput);
  Matrix nan = Matrix::Zero(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(validate_square(nan), InvalidInput);
}
