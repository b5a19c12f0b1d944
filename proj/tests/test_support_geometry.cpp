#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "nrange/planar.hpp"
#include "nrange/support_geometry.hpp"

using namespace nrange;
using namespace testing;

TEST_CASE("support_value on scalar and nilpotent matrices") {
  const Matrix id = Matrix::Identity(2, 2);
  const SupportSample s = support_value(id, 0.7);
  CHECK(s.mu == doctest::Approx(std::cos(0.7)));
  CHECK(s.multiplicity == 2);
  CHECK(s.eigenbasis.cols() == 2);

  for (Real th : {0.0, 1.0, 4.0}) {
    const SupportSample n = support_value(nilpotent2(), th);
    CHECK(n.mu == doctest::Approx(0.5));
    CHECK(n.multiplicity == 1);
    const auto g = slope_groups(nilpotent2(), n, default_flat_tol(nilpotent2()));
    REQUIRE(g.size() == 1);
    CHECK(std::abs(g[0].slope) < 1e-14);
  }
}

TEST_CASE("square boundary: four flats and four corners") {
  const BoundaryModel m = boundary_scan(square4(), 256);
  CHECK_FALSE(m.degenerate);
  CHECK(m.flats.size() == 4);
  CHECK(m.corners.size() == 4);
  const std::vector<Complex> expected{1.0, Complex(0, 1), -1.0, Complex(0, -1)};
  for (Complex v : expected) {
    bool found = false;
    for (const auto& c : m.corners) found = found || std::abs(c.z - v) <= 1e-8;
    CHECK(found);
  }
  for (const auto& c : m.corners) CHECK(c.theta2 - c.theta1 == doctest::Approx(kPi / 2).epsilon(1e-6));
  for (const auto& f : m.flats) {
    for (Complex e : f.endpoints) {
      const Real mu = support_value(square4(), f.theta0).mu;
      CHECK(std::abs((std::polar(1.0, -f.theta0) * e).real() - mu) <= 1e-8 * (1 + m.norm2));
    }
  }
  const auto ext = extreme_points(m, default_iso_tol(m));
  CHECK(ext.points.size() == 4);
  for (const auto& e : ext.points) CHECK(e.is_isolated);
  CHECK_FALSE(ext.continuum);

  CHECK(hull_contains(m, 0.0, 1e-6) == Membership::Inside);
  CHECK(hull_contains(m, 1.0, 1e-6) == Membership::Boundary);
  CHECK(hull_contains(m, 1.1, 1e-6) == Membership::Outside);
}

TEST_CASE("square with a grid that misses the flat angles") {
  const BoundaryModel m = boundary_scan(square4(), 100);
  CHECK(m.flats.size() == 4);
  CHECK(m.corners.size() == 4);
}

TEST_CASE("nilpotent boundary is the circle of radius one half") {
  const BoundaryModel m = boundary_scan(nilpotent2(), 256);
  CHECK(m.flats.empty());
  CHECK(m.corners.empty());
  Real worst = 0.0;
  for (const auto& v : m.vertices) worst = std::max(worst, std::abs(std::abs(v.z) - 0.5));
  CHECK(worst <= 1e-8);
  CHECK(m.arcs.size() == 1);

  const auto ext = extreme_points(m, 1e-3);
  CHECK(ext.continuum);
  for (const auto& e : ext.points) CHECK_FALSE(e.is_isolated);

  CHECK(hull_contains(m, 0.51, 1e-3) == Membership::Outside);
  CHECK(hull_contains(m, 0.0, 1e-6) == Membership::Inside);
  CHECK(hull_contains(m, std::polar(0.5, 0.01), 1e-9) == Membership::Boundary);

  // Brute-force sampling oracle.
  std::vector<Complex> pts;
  for (const auto& x : sample_sphere(2, 1, 100000)) pts.push_back(evaluate_range_map(nilpotent2(), x));
  CHECK(hausdorff_convex(convex_hull(pts), m.polygon()) <= 1e-3);
}

TEST_CASE("degenerate ranges are flagged") {
  const BoundaryModel m = boundary_scan(diag({1.0, -1.0}), 64);
  CHECK(m.degenerate);
  CHECK_THROWS_AS(hull_contains(m, 0.0, 1e-6), DegenerateNumericalRange);
  CHECK(boundary_scan(Matrix::Identity(3, 3), 64).degenerate);
  CHECK_THROWS_AS(boundary_scan(square4(), 32), InvalidInput);
}

TEST_CASE("half-plane consistency and convexity") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix a = random_matrix(4, rng);
    const BoundaryModel m = boundary_scan(a, 128);
    const Real tol = 1e-8 * (1 + m.norm2);
    for (const auto& v : m.vertices)
      for (std::size_t k = 0; k < m.samples.size(); ++k) {
        const Real phi = k * m.grid_step();
        CHECK((std::polar(1.0, -phi) * v.z).real() <= m.samples[k].mu + tol);
      }
    const auto poly = m.polygon();
    int bad = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Complex e1 = poly[(i + 1) % poly.size()] - poly[i];
      const Complex e2 = poly[(i + 2) % poly.size()] - poly[(i + 1) % poly.size()];
      if (cross(e1, e2) < -tol) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("rotation and translation equivariance") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  const Matrix a = random_matrix(3, rng);
  const BoundaryModel base = boundary_scan(a, 128);
  for (int trial = 0; trial < 10; ++trial) {
    const Real alpha = kPi * u(rng);
    const Complex beta(u(rng), u(rng));
    const Matrix b = std::polar(1.0, alpha) * a + beta * Matrix::Identity(3, 3);
    const BoundaryModel m = boundary_scan(b, 128);
    std::vector<Complex> moved;
    for (Complex z : base.polygon()) moved.push_back(std::polar(1.0, alpha) * z + beta);
    CHECK(hausdorff_convex(convex_hull(moved), convex_hull(m.polygon())) <= 0.05);
    // Pointwise: the support point at an angle maps to the support point at the rotated angle.
    for (int k = 0; k < 128; k += 17) {
      const Real th = k * base.grid_step();
      const Complex p = boundary_point(a, th, false, base.gap_tol, base.flat_tol);
      const Complex q = boundary_point(b, th + alpha, false, m.gap_tol, m.flat_tol);
      CHECK(std::abs(std::polar(1.0, alpha) * p + beta - q) <= 1e-8 * (1 + m.norm2));
    }
  }
}

TEST_CASE("normal matrices scan to the hull of their eigenvalues") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    Vector ev;
    const Matrix a = random_normal(5, rng, &ev);
    const BoundaryModel m = boundary_scan(a, 256);
    std::vector<Complex> pts(ev.data(), ev.data() + ev.size());
    CHECK(hausdorff_convex(convex_hull(pts), convex_hull(m.polygon())) <= 1e-6);
  }
}

TEST_CASE("brute-force equivalence for random 3x3") {
  std::mt19937_64 rng(12);
  Matrix a = random_matrix(3, rng);
  a /= a.norm();
  const BoundaryModel m = boundary_scan(a, 512);
  std::vector<Complex> pts;
  for (const auto& x : sample_sphere(3, 2, 100000)) pts.push_back(evaluate_range_map(a, x));
  const auto hull = convex_hull(pts);
  for (Complex z : hull) CHECK(hull_contains(m, z, 1e-3) != Membership::Outside);
  CHECK(hausdorff_convex(hull, convex_hull(m.polygon())) <= 1e-2);
}

TEST_CASE("normal diagonal with forty points on the unit circle") {
  Matrix a = Matrix::Zero(40, 40);
  for (int k = 1; k <= 40; ++k) a(k - 1, k - 1) = std::polar(1.0, static_cast<Real>(k));
  const BoundaryModel m = boundary_scan(a, 1024);
  const auto ext = extreme_points(m, 0.5);
  CHECK(ext.points.size() == 40);
  for (const auto& e : ext.points) {
    CHECK(std::abs(std::abs(e.z) - 1.0) <= 1e-8);
    CHECK_FALSE(e.is_isolated);
  }
}

TEST_CASE("planar helpers") {
  const std::vector<Complex> sq{1.0, Complex(0, 1), -1.0, Complex(0, -1), 0.0, Complex(0.5, 0)};
  const auto h = convex_hull(sq);
  CHECK(h.size() == 4);
  CHECK(distance_to_convex(h, 0.0) == 0.0);
  CHECK(distance_to_convex(h, 2.0) == doctest::Approx(1.0));
  CHECK(signed_depth(h, 0.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(polygon_support(h, 0.0) == doctest::Approx(1.0));
  CHECK(diameter(h) == doctest::Approx(2.0));
}
