#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "nrange/critical_curves.hpp"
#include "nrange/gallery.hpp"

using namespace nrange;
using namespace testing;

TEST_CASE("branch slopes") {
  const auto g = branch_slopes(diag({1.0, kI}), kPi / 4);
  REQUIRE(g.size() == 2);
  CHECK(g[0].slope == doctest::Approx(-std::sqrt(0.5)));
  CHECK(g[1].slope == doctest::Approx(std::sqrt(0.5)));
  const Real mu = std::sqrt(0.5);
  CHECK(std::abs(support_point(kPi / 4, mu, g[0].slope) - 1.0) < 1e-12);
  CHECK(std::abs(support_point(kPi / 4, mu, g[1].slope) - kI) < 1e-12);

  const auto n = branch_slopes(nilpotent2(), 1.234);
  REQUIRE(n.size() == 1);
  CHECK(std::abs(n[0].slope) < 1e-14);

  const auto v = branch_slopes(volterra_section(32).matrix, kPi / 2);
  REQUIRE(v.size() == 1);
  CHECK(std::abs(v[0].slope + 2 / (kPi * kPi)) <= 1e-2);
}

TEST_CASE("scalar operator has a single analytic branch") {
  const Matrix a = 2.0 * Matrix::Identity(2, 2);
  const BranchTracking t = track_branches(a, 0.0, kTwoPi, 128, 1);
  REQUIRE(t.branches.size() == 1);
  CHECK(t.crossings.empty());
  const auto& b = t.branches[0];
  CHECK(b.size() == 128);
  for (std::size_t j = 0; j < b.size(); ++j) {
    CHECK(b.lambda[j] == doctest::Approx(2 * std::cos(b.theta[j])));
    CHECK(b.lambda_prime[j] == doctest::Approx(-2 * std::sin(b.theta[j])).epsilon(1e-9));
  }
  for (Complex p : curve_points(track_branches(Matrix::Identity(2, 2), 0.0, kTwoPi, 64, 1).branches[0]))
    CHECK(std::abs(p - 1.0) < 1e-12);
}

TEST_CASE("square: four branches each maximal on a quarter turn") {
  const Matrix a = square4();
  const BranchTracking t = track_branches(a, 0.0, kTwoPi, 513, 4);
  REQUIRE(t.branches.size() == 4);
  CHECK(t.crossings.empty());
  const Real h = kTwoPi / 512;
  for (const auto& b : t.branches) {
    int maximal = 0;
    for (bool m : b.is_maximal) maximal += m;
    // Each eigenvalue is maximal for a quarter turn (inclusive endpoints, seam counted twice for one).
    CHECK(maximal * h >= kPi / 2 - 1e-9);
    CHECK(maximal * h <= kPi / 2 + 2 * h + 1e-9);
    // lambda(theta) = Re(e^{-i theta} z_j) with constant eigenvector.
    const Complex z = evaluate_range_map(a, b.vectors[0]);
    for (std::size_t j = 0; j < b.size(); j += 37)
      CHECK(b.lambda[j] == doctest::Approx((std::polar(1.0, -b.theta[j]) * z).real()));
  }
  CHECK(curves_through(t.branches, 1.0, 1e-8).count == 1);
}

TEST_CASE("volterra branches match the analytic eigenvalues") {
  const GalleryOperator v = volterra_section(32);
  const BranchTracking t = track_branches(v.matrix, kPi / 4, 3 * kPi / 4, 256, 3);
  REQUIRE(t.branches.size() >= 3);
  for (int n = 0; n < 3; ++n) {
    Real err = 0.0;
    const auto& b = t.branches[n];
    CHECK(b.size() == 256);
    for (std::size_t j = 0; j < b.size(); ++j) err = std::max(err, std::abs(b.lambda[j] - volterra_branch(n, b.theta[j])));
    CHECK(err <= 2e-2);
  }

  // Top branch at pi/2 reproduces the boundary curve.
  const auto pts = curve_points(t.branches[0]);
  const Real h = kPi / 2 / 255;
  const int mid = static_cast<int>(std::lround((kPi / 2 - kPi / 4) / h));
  const Complex expected(2 / (kPi * kPi), 1 / kPi);
  CHECK(std::abs(pts[mid] - expected) <= 1e-2 + 2 * h);
  const BranchTracking at = track_branches(v.matrix, kPi / 2 - 0.01, kPi / 2 + 0.01, 65, 1);
  CHECK(std::abs(curve_points(at.branches[0])[32] - expected) <= 1e-2);
  CHECK(std::abs(volterra_boundary(kPi) - expected) <= 1e-12);
}

TEST_CASE("branch invariants on random matrices") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix a = random_matrix(4, rng);
    const Real fa = a.norm();
    const BoundaryModel m = boundary_scan(a, 256);
    const BranchTracking t = track_branches(a, 0.0, kTwoPi, 257, 4);
    const Real h = kTwoPi / 256;
    for (const auto& b : t.branches) {
      const auto pts = curve_points(b);
      for (std::size_t j = 0; j < b.size(); ++j) {
        const Matrix re = cartesian_part(a, b.theta[j], Part::Real);
        const Matrix im = cartesian_part(a, b.theta[j], Part::Imaginary);
        const Vector& x = b.vectors[j].components;
        CHECK((re * x - b.lambda[j] * x).norm() <= 1e-8 * (1 + fa));
        CHECK(std::abs(b.lambda_prime[j] - x.dot(im * x).real()) <= 1e-10 * (1 + fa));
        CHECK(std::abs(pts[j] - evaluate_range_map(a, b.vectors[j])) <= 1e-6 * (1 + m.norm2));
        CHECK(hull_contains(m, pts[j], 1e-6 * (1 + m.norm2)) != Membership::Outside);
        if (b.is_maximal[j]) {
          const Complex q = boundary_point(a, b.theta[j], false, m.gap_tol, m.flat_tol);
          CHECK(std::abs(q - pts[j]) <= 1e-8 * (1 + m.norm2));
        }
        if (j + 1 < b.size()) {
          CHECK(std::abs(b.vectors[j].components.dot(b.vectors[j + 1].components)) >= 0.9);
          CHECK(std::abs(b.lambda[j + 1] - b.lambda[j]) <= m.norm2 * h + 1e-8);
        }
      }
    }
  }
}

TEST_CASE("curve counts at characteristic points") {
  const BranchTracking nil = track_branches(nilpotent2(), 0.0, kTwoPi, 257, 2);
  CHECK(curves_through(nil.branches, 0.5, 1e-8).count == 1);

  const GalleryOperator c = cjkls_block(1.0, 1.0);
  const BranchTracking t = track_branches(c.matrix, 0.0, kTwoPi, 257, 4);
  const CurvesThrough ct = curves_through(t.branches, 0.0, 1e-8);
  CHECK(ct.count == 2);
  if (ct.count == 2) CHECK(ct.branch_ids[0] != ct.branch_ids[1]);
}

TEST_CASE("strict mode raises BranchLost at an avoided crossing") {
  // Avoided crossing at pi/2, which is a grid angle: the eigenvectors there are
  // equal mixtures of the neighbouring ones.
  Matrix a = diag({1.0, -1.0});
  a(0, 1) = 1e-3;
  bool thrown = false;
  try {
    TrackOptions opt;
    opt.strict = true;
    track_branches(a, 0.0, kTwoPi, 65, 2, opt);
  } catch (const BranchLost& e) {
    thrown = true;
    CHECK(e.overlap < 0.9);
  }
  CHECK(thrown);
  const BranchTracking relaxed = track_branches(a, 0.0, kTwoPi, 65, 2);
  CHECK_FALSE(relaxed.crossings.empty());
}

TEST_CASE("arcs are tagged with their maximal branch") {
  BoundaryModel m = boundary_scan(nilpotent2(), 128);
  const BranchTracking t = track_branches(nilpotent2(), 0.0, kTwoPi, 129, 1);
  tag_arcs(m, t.branches);
  REQUIRE(m.arcs.size() == 1);
  CHECK(m.arcs[0].branch_id == t.branches[0].id);
}

TEST_CASE("finite-difference slope convergence") {
  std::mt19937_64 rng(17);
  const Matrix a = random_matrix(3, rng);
  const BranchTracking coarse = track_branches(a, 0.0, kTwoPi, 257, 3);
  const BranchTracking fine = track_branches(a, 0.0, kTwoPi, 513, 3);
  REQUIRE(coarse.crossings.empty());
  REQUIRE(fine.crossings.empty());
  for (int b = 0; b < 3; ++b) {
    Real ec = 0.0, ef = 0.0;
    const auto& c = coarse.branches[b];
    const auto& f = fine.branches[b];
    for (std::size_t j = 1; j + 1 < c.size(); ++j) {
      const Real hc = c.theta[j + 1] - c.theta[j - 1];
      ec += std::abs(c.lambda_prime[j] - (c.lambda[j + 1] - c.lambda[j - 1]) / hc);
      const std::size_t k = 2 * j;
      const Real hf = f.theta[k + 1] - f.theta[k - 1];
      ef += std::abs(f.lambda_prime[k] - (f.lambda[k + 1] - f.lambda[k - 1]) / hf);
    }
    CHECK(std::log2(ec / ef) >= 1.8);
  }
}
