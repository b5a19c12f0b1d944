#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "nrange/gallery.hpp"
#include "nrange/inverse_map.hpp"

using namespace nrange;
using namespace testing;

TEST_CASE("solve_2x2 closed-form cases") {
  const Matrix nil = nilpotent2();
  const UnitVector u = solve_2x2(nil, 0.5, 1e-12);
  CHECK(std::abs(range_map(nil, u.components) - 0.5) <= 1e-12);
  CHECK(std::abs(std::abs(u.components(0)) - std::sqrt(0.5)) <= 1e-6);
  CHECK(std::abs(std::abs(u.components(1)) - std::sqrt(0.5)) <= 1e-6);

  const UnitVector q = solve_2x2(nil, 0.25, 1e-12);
  CHECK(std::abs(range_map(nil, q.components) - 0.25) <= 1e-12);
  CHECK(std::abs(q.components(0)) == doctest::Approx(std::cos(kPi / 12)).epsilon(1e-6));

  const Matrix d = diag({0.0, 1.0});
  const UnitVector v = solve_2x2(d, 0.3, 1e-12);
  CHECK(std::abs(range_map(d, v.components) - 0.3) <= 1e-12);
  CHECK(std::abs(v.components(0)) == doctest::Approx(std::sqrt(0.7)).epsilon(1e-9));
  CHECK(std::abs(v.components(1)) == doctest::Approx(std::sqrt(0.3)).epsilon(1e-9));

  CHECK_THROWS_AS(solve_2x2(nil, 0.6, 1e-9), NotInRange);
  CHECK_THROWS_AS(solve_2x2(d, Complex(0.5, 0.1), 1e-9), NotInRange);
  CHECK_THROWS_AS(solve_2x2(Matrix::Identity(3, 3), 0.0, 1e-9), DimensionMismatch);
  CHECK(std::abs(range_map(Matrix::Identity(2, 2), solve_2x2(Matrix::Identity(2, 2), 1.0, 1e-12).components) - 1.0) < 1e-14);
}

TEST_CASE("solve_2x2 on random ellipses") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix b = random_matrix(2, rng);
    const UnitVector x = sample_sphere(2, 100 + trial, 1)[0];
    const Complex z = evaluate_range_map(b, x);
    const UnitVector u = solve_2x2(b, z, 1e-11);
    CHECK(std::abs(range_map(b, u.components) - z) <= 1e-11);
    CHECK(std::abs(u.components.norm() - 1.0) <= 1e-14);
  }
}

TEST_CASE("boundary preimages") {
  const auto r = boundary_preimages(diag({2.0, -1.0}), 0.0);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0].achieved - 2.0) <= 1e-12);
  CHECK(std::abs(std::abs(r[0].x.components(0)) - 1.0) <= 1e-12);

  const auto f = boundary_preimages(diag({1.0, kI}), kPi / 4, -1.0, 8);
  REQUIRE(f.size() == 2 + 7);
  CHECK(std::abs(f[0].achieved - 1.0) <= 1e-12);
  CHECK(std::abs(f[1].achieved - kI) <= 1e-12);
  CHECK(f[0].span_projector_rank == 2);
  const Real mu = std::sqrt(0.5);
  for (const auto& p : f) CHECK(std::abs((std::polar(1.0, -kPi / 4) * p.achieved).real() - mu) <= 1e-9);

  const GalleryOperator v = volterra_section(32);
  const auto b = boundary_preimages(v.matrix, kPi / 2);
  REQUIRE(b.size() == 1);
  CHECK(std::abs(b[0].achieved - Complex(2 / (kPi * kPi), 1 / kPi)) <= 1e-2);
  // Fourier coefficients of e^{-i pi t}: |c_m| = 2/(pi |2m + 1|), normalized.
  Vector ref(65);
  for (int m = -32; m <= 32; ++m) ref(volterra_index(m, 32)) = 2.0 / (kPi * std::abs(2 * m + 1));
  ref.normalize();
  CHECK(std::abs(b[0].x.components.cwiseAbs().dot(ref.cwiseAbs())) >= 0.99);
}

TEST_CASE("preimage examples") {
  const PreimageResult n = preimage(nilpotent2(), 0.0, 1e-10);
  CHECK(n.residual <= 1e-10);
  CHECK(n.construction == Construction::TwoByTwoReduction);
  CHECK(preimage(square4(), 0.0, 1e-10).residual <= 1e-10);
  const PreimageResult v = preimage(volterra_section(32).matrix, Complex(0.1, 0.05), 1e-8);
  CHECK(v.residual <= 1e-8);
  CHECK(std::abs(evaluate_range_map(volterra_section(32).matrix, v.x) - Complex(0.1, 0.05)) <= 1e-8);

  const PreimageResult c = preimage(square4(), 1.0, 1e-10);
  CHECK(c.construction == Construction::BoundaryEigenvector);
  CHECK(c.residual <= 1e-10);
  const PreimageResult fl = preimage(square4(), Complex(0.5, 0.5), 1e-10);
  CHECK(fl.residual <= 1e-10);
  CHECK_THROWS_AS(preimage(square4(), 2.0, 1e-10), OutsideRange);
}

TEST_CASE("preimage on degenerate ranges") {
  CHECK(preimage(diag({-1.0, 0.5, 2.0}), 1.2, 1e-10).residual <= 1e-10);
  CHECK_THROWS_AS(preimage(diag({-1.0, 2.0}), Complex(0.0, 0.1), 1e-10), OutsideRange);
  CHECK(preimage(Matrix::Identity(3, 3), 1.0, 1e-10).residual <= 1e-10);
}

TEST_CASE("round trip on random matrices") {
  std::mt19937_64 rng(99);
  int worst_fail = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    const Matrix a = random_matrix(n, rng);
    const UnitVector x = sample_sphere(n, 1000 + trial, 1)[0];
    const Complex z = evaluate_range_map(a, x);
    const PreimageResult r = preimage(a, z, 1e-8);
    if (r.residual > 1e-8) ++worst_fail;
    CHECK(std::abs(r.x.components.norm() - 1.0) <= 1e-12);
  }
  CHECK(worst_fail == 0);
}

TEST_CASE("boundary preimage is unique up to phase at simple points") {
  const GalleryOperator v = volterra_section(16);
  for (Real th : {1.0, 2.0, 4.0}) {
    const auto b = boundary_preimages(v.matrix, th);
    REQUIRE(b.size() == 1);
    const PreimageResult p = preimage(v.matrix, b[0].achieved, 1e-12);
    CHECK(p.residual <= 1e-12);
    CHECK(std::abs(p.x.components.dot(b[0].x.components)) >= 1 - 1e-4);
  }
}

TEST_CASE("span projector") {
  std::vector<UnitVector> xs = {UnitVector::normalize(Vector::Unit(3, 0)), UnitVector::normalize(Vector::Unit(3, 1)),
                                UnitVector::normalize(Vector::Unit(3, 0) + Vector::Unit(3, 1))};
  CHECK(span_rank(xs) == 2);
  const Matrix p = span_projector(xs);
  CHECK((p * p - p).norm() <= 1e-12);
  CHECK(std::abs(p(2, 2)) <= 1e-12);
}

TEST_CASE("preimages inside polygons whose boundary is all flats") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  for (const Matrix& a : {square4(), example1_diag().matrix}) {
    const BoundaryModel m = boundary_scan(a, 256);
    int tried = 0;
    while (tried < 40) {
      const Complex z(u(rng), u(rng));
      if (support_gap(m, z).gap < 1e-3) continue;
      ++tried;
      const PreimageResult r = preimage(m, z, 1e-10);
      CHECK(r.residual <= 1e-10);
    }
  }
}
