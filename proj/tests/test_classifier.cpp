#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "nrange/classifier.hpp"

using namespace nrange;
using namespace testing;

TEST_CASE("interior point of the nilpotent disk") {
  const BoundaryModel m = boundary_scan(nilpotent2(), 256);
  const ClassificationReport r = classify_point(m, 0.0, {});
  CHECK(r.location == Location::Interior);
  CHECK(r.verdict == Verdict::Strong);
  CHECK(r.rule == "interior-point");
  CHECK_THROWS_AS(classify_point(m, 0.6, {}), OutsideRange);

  // Boundary points of the disk: simple maximal eigenvalue, one curve.
  const ClassificationReport b = classify_point(m, 0.5, {});
  CHECK(b.location == Location::BoundaryArc);
  CHECK(b.verdict == Verdict::Strong);
  CHECK(b.evidence.curve_count == 1);
}

TEST_CASE("two-ellipse block example fails weak continuity at 0") {
  const GalleryOperator c = cjkls_block(1.0, 1.0);
  const BoundaryModel m = boundary_scan(c.matrix, 512);
  const BranchTracking t = track_branches(c.matrix, 0.0, kTwoPi, 513, 4);
  ClassifyOptions opt;
  opt.metadata = c.metadata;
  const ClassificationReport r = classify_point(m, 0.0, t.branches, opt);
  CHECK(r.verdict == Verdict::FailsWeak);
  CHECK(r.kase == Case::III);
  CHECK(r.evidence.curve_count == 2);
  CHECK(r.evidence.tracked_curve_count == 2);
  CHECK(r.evidence.side_overlap <= 0.1);
  CHECK(r.evidence.multiplicity == 2);

  const BoundaryClassification all = classify_boundary(m, t.branches, opt);
  CHECK(all.finite);
  CHECK(all.non_strong == 1);
  REQUIRE(all.non_strong_points.size() == 1);
  CHECK(std::abs(all.non_strong_points[0]) <= 1e-3);
  CHECK(all.undecidable == 0);
}

TEST_CASE("normal polygon is strong everywhere") {
  const BoundaryModel m = boundary_scan(square4(), 256);
  const BoundaryClassification all = classify_boundary(m, {});
  CHECK(all.non_strong == 0);
  CHECK(all.undecidable == 0);
  int corners = 0, flats = 0;
  for (const auto& r : all.reports) {
    CHECK(r.verdict == Verdict::Strong);
    corners += r.location == Location::Corner;
    flats += r.location == Location::FlatInterior;
  }
  CHECK(corners == 4);
  CHECK(flats == 4);
}

TEST_CASE("normal limit point rule with declared metadata") {
  const GalleryOperator e = example1_diag();
  const BoundaryModel m = boundary_scan(e.matrix, 512);
  ClassifyOptions opt;
  opt.metadata = e.metadata;
  const ClassificationReport r = classify_point(m, 0.0, {}, opt);
  CHECK(r.verdict == Verdict::FailsWeak);
  CHECK(r.rule == "normal-limit-of-extreme-points");
  CHECK(r.evidence.declared_limit);
  // Without metadata 0 is an isolated corner of the finite polygon.
  CHECK(classify_point(m, 0.0, {}).verdict == Verdict::Strong);
}

TEST_CASE("volterra section: flat endpoints resolved, arcs strong") {
  const GalleryOperator v = volterra_section(32);
  const BoundaryModel m = boundary_scan(v.matrix, 512);
  ClassifyOptions opt;
  opt.metadata = v.metadata;
  opt.arc_samples = 8;
  const BoundaryClassification all = classify_boundary(m, {}, opt);
  CHECK(all.non_strong == 0);
  int endpoints = 0;
  for (const auto& r : all.reports) {
    if (r.location == Location::FlatEndpoint) {
      ++endpoints;
      CHECK(r.verdict == Verdict::Strong);
    }
    if (r.location == Location::BoundaryArc) CHECK(r.verdict == Verdict::Strong);
  }
  CHECK(endpoints == 2);
}

TEST_CASE("essential-like top eigenspace is undecidable") {
  // Disk of radius 1/2 plus the scalar 1/2 on its rim: double top eigenvalue at theta = 0, n = 3.
  Matrix a = Matrix::Zero(3, 3);
  a(1, 0) = 1.0;
  a(2, 2) = 0.5;
  const BoundaryModel m = boundary_scan(a, 256);
  const ClassificationReport r = classify_point(m, 0.5, {});
  CHECK(r.evidence.essential_like);
  CHECK(r.evidence.multiplicity == 2);
  CHECK(r.verdict == Verdict::Undecidable);
  CHECK(r.rule == "maximal-eigenvalue-not-isolated");
}

TEST_CASE("verdicts are invariant under rotation and translation") {
  const GalleryOperator c = cjkls_block(1.0, 1.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  const std::vector<Complex> probes = {0.0, Complex(0.3, 0.1), boundary_point(c.matrix, 2.0, true, -1, -1)};
  const BoundaryModel base = boundary_scan(c.matrix, 256);
  std::vector<Verdict> ref;
  for (Complex z : probes) ref.push_back(classify_point(base, z, {}).verdict);
  CHECK(ref[0] == Verdict::FailsWeak);
  for (int trial = 0; trial < 5; ++trial) {
    const Real alpha = kPi * u(rng);
    const Complex beta(u(rng), u(rng));
    const Complex rot = std::polar(1.0, alpha);
    const Matrix b = rot * c.matrix + beta * Matrix::Identity(4, 4);
    const BoundaryModel m = boundary_scan(b, 256);
    for (std::size_t i = 0; i < probes.size(); ++i) CHECK(classify_point(m, rot * probes[i] + beta, {}).verdict == ref[i]);
  }
}
