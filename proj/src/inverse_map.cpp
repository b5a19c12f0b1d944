#include "nrange/inverse_map.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "nrange/planar.hpp"
#include "nrange/search.hpp"

namespace nrange {

const char* to_string(Construction c) {
  return c == Construction::BoundaryEigenvector ? "boundary_eigenvector" : "two_by_two_reduction";
}

namespace {

PreimageResult make_result(const Matrix& a, Complex z, UnitVector x, Construction c) {
  PreimageResult r;
  r.z_target = z;
  r.achieved = evaluate_range_map(a, x);
  r.residual = std::abs(r.achieved - z);
  r.x = std::move(x);
  r.construction = c;
  return r;
}

// Orthonormalize {x1, x2}, solve on the compression and lift back.
std::optional<UnitVector> chord_solve(const Matrix& a, const Vector& x1, const Vector& x2, Complex z, Real tol,
                                      bool last_root = false) {
  Matrix q(x1.size(), 2);
  q.col(0) = x1.normalized();
  Vector r = x2 - q.col(0) * q.col(0).dot(x2);
  const Real rn = r.norm();
  if (rn < 1e-10) return std::nullopt;
  q.col(1) = r / rn;
  try {
    const UnitVector u = solve_2x2(compress(a, q), z, tol, last_root);
    return UnitVector::normalize(q * u.components);
  } catch (const NotInRange&) {
    return std::nullopt;
  }
}

// Preimage of z on the support line at theta: eigenvector, or a 2x2 solve
// between the extreme slope directions when the line meets W(A) in a flat.
std::optional<UnitVector> on_support_line(const BoundaryModel& m, Real theta, Complex z, Real tol) {
  const SupportSample s = support_value(m.a, theta, m.gap_tol);
  const auto groups = slope_groups(m.a, s, m.flat_tol);
  const Vector lo = groups.front().basis.col(0);
  if (groups.size() == 1) return UnitVector::normalize(lo);
  const Vector hi = groups.back().basis.col(0);
  if (auto x = chord_solve(m.a, lo, hi, z, tol)) return x;
  const Complex zl = support_point(theta, s.mu, groups.front().slope);
  const Complex zh = support_point(theta, s.mu, groups.back().slope);
  return UnitVector::normalize(std::abs(zl - z) <= std::abs(zh - z) ? lo : hi);
}

// Preimage of the point where the ray z + t d (t > 0) leaves W(A).
std::optional<UnitVector> exit_preimage(const BoundaryModel& m, Complex z, Complex d, Real tol) {
  const int n = m.grid_size;
  const Real h = m.grid_step();
  auto p_at = [&](Real th) { return boundary_point(m.a, th, true, m.gap_tol, m.flat_tol); };
  auto side = [&](Complex p) { return cross(d, p - z); };
  std::vector<Complex> p(n);
  for (int k = 0; k < n; ++k) p[k] = support_point(k * h, m.samples[k].mu, m.slopes[k].back().slope);
  int k0 = -1;
  for (int k = 0; k < n; ++k) {
    const Complex q = p[(k + 1) % n];
    if (side(p[k]) <= 0 && side(q) > 0 && (std::conj(d) * (q - z)).real() > 0) {
      k0 = k;
      break;
    }
  }
  if (k0 < 0) return std::nullopt;
  const auto [lo, hi] = bisect_predicate([&](Real th) { return side(p_at(th)) > 0; }, k0 * h, (k0 + 1) * h, 200);
  const Complex plo = p_at(lo);
  const Complex phi = p_at(hi);
  if (std::abs(phi - plo) > 1e-3 * tol) {
    // Jump across a flat: intersect the ray with it. The flat's angle is
    // usually one of the bracket ends (often a grid angle).
    for (Real th : {hi, lo, 0.5 * (lo + hi)}) {
      const SupportSample s = support_value(m.a, th, m.gap_tol);
      const auto groups = slope_groups(m.a, s, m.flat_tol);
      if (groups.size() < 2) continue;
      const Vector v0 = groups.front().basis.col(0);
      const Vector v1 = groups.back().basis.col(0);
      const Complex e0 = range_map(m.a, v0);
      const Complex e1 = range_map(m.a, v1);
      const Real den = cross(d, e1 - e0);
      const Real u = den == 0.0 ? 0.0 : std::clamp(cross(d, z - e0) / den, 0.0, 1.0);
      if (auto x = chord_solve(m.a, v0, v1, e0 + u * (e1 - e0), 1e-2 * tol)) return x;
    }
  }
  const Real th = std::abs(side(plo)) <= std::abs(side(phi)) ? lo : hi;
  const SupportSample s = support_value(m.a, th, m.gap_tol);
  return UnitVector::normalize(slope_groups(m.a, s, m.flat_tol).back().basis.col(0));
}

PreimageResult degenerate_preimage(const BoundaryModel& m, Complex z, Real tol) {
  const auto pts = m.polygon();
  const Eigen::Index n = m.a.rows();
  if (pts.size() <= 1) {
    PreimageResult r = make_result(m.a, z, UnitVector::normalize(Vector::Unit(n, 0)), Construction::BoundaryEigenvector);
    if (r.residual > tol) throw OutsideRange("point is not the numerical range");
    return r;
  }
  const Complex dir = pts.back() - pts.front();
  if (point_segment_distance(z, pts.front(), pts.back()) > tol) throw OutsideRange("point outside the numerical range segment");
  const Real th = std::arg(dir);
  const Vector x1 = support_value(m.a, th, m.gap_tol).eigenbasis.col(0);
  const Vector x2 = support_value(m.a, th + kPi, m.gap_tol).eigenbasis.col(0);
  PreimageResult r = make_result(m.a, z, UnitVector::normalize(x1), Construction::BoundaryEigenvector);
  if (r.residual <= tol) return r;
  if (auto x = chord_solve(m.a, x1, x2, z, tol)) r = make_result(m.a, z, *x, Construction::TwoByTwoReduction);
  if (r.residual > tol) throw OutsideRange("point outside the numerical range segment");
  return r;
}

}  // namespace

std::vector<PreimageResult> boundary_preimages(const Matrix& a, Real theta, Real gap_tol, int sweep) {
  validate_square(a);
  const SupportSample s = support_value(a, theta, gap_tol);
  const auto groups = slope_groups(a, s, default_flat_tol(a));
  std::vector<PreimageResult> out;
  std::vector<UnitVector> xs;
  for (const auto& g : groups)
    for (Eigen::Index j = 0; j < g.basis.cols(); ++j) {
      const Vector v = g.basis.col(j);
      out.push_back(make_result(a, evaluate_range_map(a, UnitVector::normalize(v)), UnitVector::normalize(v),
                                Construction::BoundaryEigenvector));
    }
  if (sweep > 0 && s.multiplicity > 1) {
    const Vector v1 = groups.front().basis.col(0);
    const Vector v2 = groups.size() > 1 ? Vector(groups.back().basis.col(0)) : Vector(groups.front().basis.col(1));
    for (int k = 1; k < sweep; ++k) {
      const Real t = kPi / 2 * k / sweep;
      const UnitVector x = UnitVector::normalize(std::cos(t) * v1 + std::sin(t) * v2);
      out.push_back(make_result(a, evaluate_range_map(a, x), x, Construction::BoundaryEigenvector));
    }
  }
  for (const auto& r : out) xs.push_back(r.x);
  const int rank = span_rank(xs);
  for (auto& r : out) r.span_projector_rank = rank;
  return out;
}

UnitVector solve_2x2(const Matrix& b, Complex z, Real tol, bool last_root) {
  if (b.rows() != 2 || b.cols() != 2) throw DimensionMismatch("solve_2x2 expects a 2x2 matrix");
  if (!b.allFinite() || !std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidInput("non-finite input");
  // Zero-trace Schur form [[lam, c], [0, -lam]]; for u = (cos s, e^{i phi} sin s)
  // and t = 2s, u* T u = lam cos t + (c/2) sin t e^{i phi}.
  const Complex shift = 0.5 * b.trace();
  const Complex w = z - shift;
  Eigen::ComplexSchur<Matrix> schur(b - shift * Matrix::Identity(2, 2));
  const Matrix& t = schur.matrixT();
  const Complex lam = 0.5 * (t(0, 0) - t(1, 1));
  const Complex c = t(0, 1);
  const Real hc = 0.5 * std::abs(c);
  auto f = [&](Real s) { return hc * std::sin(s) - std::abs(w - lam * std::cos(s)); };

  const int scan = 256;
  Real best_t = 0.0;
  Real best = f(0.0);
  for (int k = 1; k <= scan; ++k) {
    const Real s = kPi * k / scan;
    const Real v = f(s);
    if (v > best) best = v, best_t = s;
  }
  const MinResult r = golden_min([&](Real s) { return -f(s); }, std::max(0.0, best_t - kPi / scan),
                                 std::min(kPi, best_t + kPi / scan), 1e-15);
  if (-r.fx > best) best = -r.fx, best_t = r.x;
  if (best < -tol) throw NotInRange("point outside the 2x2 numerical range");

  // f(0) = -|w - lam| and f(pi) = -|w + lam|, so f >= 0 there means a root.
  Real root = best_t;
  if (best > 0.0) {
    if (!last_root)
      root = f(0.0) >= 0.0 ? 0.0 : bisect_predicate([&](Real s) { return f(s) >= 0.0; }, 0.0, best_t, 200).second;
    else
      root = f(kPi) >= 0.0 ? kPi : bisect_predicate([&](Real s) { return f(s) < 0.0; }, best_t, kPi, 200).first;
  }
  const Complex rest = w - lam * std::cos(root);
  const Real phase = (std::abs(rest) > 0 ? std::arg(rest) : 0.0) - (std::abs(c) > 0 ? std::arg(c) : 0.0);
  Vector u(2);
  u << std::cos(root / 2), std::polar(std::sin(root / 2), phase);
  return UnitVector::normalize(schur.matrixU() * u);
}

PreimageResult preimage(const Matrix& a, Complex z, Real tol, PreimageOptions opt) {
  validate_square(a);
  return preimage(boundary_scan(a, opt.grid_size), z, tol, opt);
}

PreimageResult preimage(const BoundaryModel& m, Complex z, Real tol, PreimageOptions opt) {
  if (!(tol > 0)) throw InvalidInput("tolerance must be positive");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidInput("non-finite target");
  if (m.degenerate) return degenerate_preimage(m, z, tol);

  const SupportGap g = support_gap(m, z);
  if (g.gap < -tol) throw OutsideRange("point outside the numerical range");
  if (g.gap <= tol) {
    for (Real th : {g.theta, tangency_angle(m, z, g.theta)}) {
      if (auto x = on_support_line(m, th, z, tol)) {
        PreimageResult r = make_result(m.a, z, *x, Construction::BoundaryEigenvector);
        if (r.residual <= tol) return r;
      }
    }
    if (g.gap <= 0.0) throw OutsideRange("point on the boundary within tolerance but not reachable");
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<Real> angle(0.0, kTwoPi);
  Complex d = std::polar(1.0, g.theta + kPi / 2 + opt.chord_offset);
  for (int attempt = 0; attempt < opt.max_chords; ++attempt) {
    if (attempt > 0) d = std::polar(1.0, angle(rng));
    try {
      const auto x1 = exit_preimage(m, z, d, tol);
      const auto x2 = exit_preimage(m, z, -d, tol);
      if (!x1 || !x2) continue;
      if (auto x = chord_solve(m.a, x1->components, x2->components, z, tol, opt.last_root)) {
        PreimageResult r = make_result(m.a, z, *x, Construction::TwoByTwoReduction);
        if (r.residual <= tol) return r;
      }
    } catch (const NoConvergence&) {
    }
  }
  throw ChordSearchFailed("no chord through the point produced a preimage", opt.max_chords);
}

Matrix span_projector(const std::vector<UnitVector>& xs, Real tol) {
  if (xs.empty()) return Matrix();
  Matrix x(xs.front().dim(), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = xs[j].components;
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  const Matrix u = svd.matrixU().leftCols(r);
  return u * u.adjoint();
}

int span_rank(const std::vector<UnitVector>& xs, Real tol) {
  if (xs.empty()) return 0;
  return static_cast<int>(std::lround(span_projector(xs, tol).trace().real()));
}

}  // namespace nrange
