#include "nrange/prober.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "nrange/inverse_map.hpp"
#include "nrange/planar.hpp"
#include "nrange/search.hpp"

namespace nrange {

std::vector<Real> ProbeConfig::deltas() const {
  std::vector<Real> d = delta_grid;
  if (d.empty()) {
    const int k = 64;
    const Real lo = 0.005;
    for (int i = 0; i < k; ++i) d.push_back(lo * std::pow(1.0 / lo, static_cast<Real>(i) / (k - 1)));
    d.back() = 1.0;
  }
  std::sort(d.begin(), d.end());
  return d;
}

void ProbeConfig::validate() const {
  if (eps_list.empty()) throw InvalidInput("eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0 && eps_list[i] <= 2)) throw InvalidInput("eps values must lie in (0, 2]");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw InvalidInput("eps list must be decreasing");
  }
  for (Real d : deltas())
    if (!(d > 0 && d <= 1)) throw InvalidInput("delta values must lie in (0, 1]");
  if (samples_per_eps < 8) throw InvalidInput("samples_per_eps must be >= 8");
  if (coverage_resolution < 1) throw InvalidInput("coverage_resolution must be >= 1");
  if (support_grid < 8) throw InvalidInput("support_grid must be >= 8");
}

const char* to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::Open: return "open";
    case ProbeVerdict::NotOpen: return "not_open";
    case ProbeVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<Complex> cap_image(const Matrix& a, const UnitVector& x, Real eps, int count, std::uint64_t seed) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (const auto& y : sample_cap(x, eps, seed, count)) out.push_back(evaluate_range_map(a, y));
  return out;
}

Real convexity_defect(const std::vector<Complex>& cloud, int probes, std::uint64_t seed) {
  if (cloud.size() < 2) return 0.0;
  const Real diam = diameter(cloud);
  if (diam < 1e-12) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
  Real worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Complex mid = 0.5 * (cloud[pick(rng)] + cloud[pick(rng)]);
    Real best = std::numeric_limits<Real>::infinity();
    for (Complex c : cloud) best = std::min(best, std::norm(c - mid));
    worst = std::max(worst, std::sqrt(best));
  }
  return worst / diam;
}

namespace {

Real probe_margin(const BoundaryModel& m) { return std::max(1e-6 * m.diameter(), 1e-13 * (1 + m.norm2)); }

// Largest t >= 0 with z + t d inside the CCW convex polygon.
Real ray_exit(const std::vector<Complex>& poly, Complex z, Complex d) {
  Real t = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Complex e = poly[(i + 1) % poly.size()] - poly[i];
    const Real c0 = cross(e, z - poly[i]);
    const Real c1 = cross(e, d);
    if (c1 < 0) t = std::min(t, c0 / -c1);
  }
  return std::max(0.0, t);
}

// Exit points of W(A) from z along each coverage direction.
std::vector<Complex> exit_points(const BoundaryModel& m, Complex z, int resolution) {
  const std::vector<Complex> poly = convex_hull(m.polygon());
  if (poly.size() <= 1) return {z};
  if (poly.size() == 2) return {poly[0], poly[1]};
  std::vector<Complex> w;
  for (int j = 0; j < resolution; ++j) {
    const Complex d = std::polar(1.0, kTwoPi * j / resolution);
    w.push_back(z + ray_exit(poly, z, d) * d);
  }
  return w;
}

// Largest root of 1 = nu sum_k w2_k / (t - lam_k), above every lam_k that w sees.
Real secular_root(const RealVector& lam, const RealVector& w2, Real lam_star, Real total, Real nu) {
  Real lo = lam_star;
  Real hi = lam_star + nu * total;
  for (int it = 0; it < 200; ++it) {
    const Real mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    Real s = 0.0;
    for (Eigen::Index k = 0; k < lam.size(); ++k)
      if (w2(k) > 0) s += w2(k) / (mid - lam(k));
    (nu * s > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

Real delta_coverage(const BoundaryModel& m, Complex z, const std::vector<Complex>& cloud, const ProbeConfig& cfg) {
  const std::vector<Complex> hull = convex_hull(cloud);
  const std::vector<Complex> w = exit_points(m, z, cfg.coverage_resolution);
  const Real margin = probe_margin(m);
  Real best = 0.0;
  for (Real d : cfg.deltas()) {
    bool ok = true;
    for (Complex p : w)
      if (distance_to_convex(hull, z + d * (p - z)) > margin) {
        ok = false;
        break;
      }
    if (ok) best = std::max(best, d);
  }
  return best;
}

CapSupport cap_support(const Matrix& a, const UnitVector& x, Real eps, Real theta) {
  // The image of {Re<x,y> >= c} equals that of {|<x,y>| >= c} (phase freedom),
  // and the dual of max y*Hy s.t. |<x,y>|^2 >= c^2 is exact:
  // h(theta) = min_{nu >= 0} lambda_max(H + nu x x*) - nu c^2.
  const SpectralDecomposition sd = hermitian_eig(cartesian_part(a, theta, Part::Real));
  const Eigen::Index n = sd.size();
  const Vector w = sd.eigenvectors.adjoint() * x.components;
  const RealVector& lam = sd.eigenvalues;
  RealVector w2 = w.cwiseAbs2();
  const Real total = w2.sum();
  const Real top = lam(n - 1);
  const Real top_tol = 1e-13 * (1 + std::abs(top));
  Real wt = 0.0;
  Real lam_star = -std::numeric_limits<Real>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (w2(k) <= 1e-28 * total) w2(k) = 0.0;
    if (lam(k) >= top - top_tol) wt += w2(k);
    if (w2(k) > 0) lam_star = std::max(lam_star, lam(k));
  }
  const Real xhx = w2.dot(lam) / total;
  const Real c = std::max(0.0, 1.0 - 0.5 * eps * eps);
  const Real c2 = c * c;

  CapSupport out;
  auto set_point = [&](const Vector& coeffs) {
    out.has_point = true;
    out.point = range_map(a, Vector(sd.eigenvectors * coeffs.normalized()));
  };
  auto resolvent = [&](Real t) {
    Vector y = Vector::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k)
      if (w2(k) > 0) y(k) = w(k) / (t - lam(k));
    return y;
  };
  auto overlap2 = [&](Real t) {
    Real s1 = 0.0, s2 = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (w2(k) > 0) {
        s1 += w2(k) / (t - lam(k));
        s2 += w2(k) / ((t - lam(k)) * (t - lam(k)));
      }
    return std::pair{s1, s1 * s1 / s2};
  };

  if (c2 >= 1.0) {
    out.value = xhx;
    out.has_point = true;
    out.point = evaluate_range_map(a, x);
    return out;
  }
  if (c <= 0.0) {
    out.value = top;
    set_point(Vector::Unit(n, n - 1));
    return out;
  }
  if (top - xhx <= top_tol) {
    out.value = top;
    out.has_point = true;
    out.point = evaluate_range_map(a, x);
    return out;
  }
  if (wt == 0.0) {
    // x misses the top eigenspace; if the resolvent at t = top already keeps
    // enough overlap, the maximizer mixes it with a top eigenvector.
    const auto [s1, a2] = overlap2(top);
    if (a2 >= c2) {
      out.value = top - c2 / s1;
      const Real alpha = std::sqrt(c2 / a2);
      Vector y = alpha * resolvent(top).normalized();
      y(n - 1) += std::sqrt(std::max(0.0, 1 - alpha * alpha));
      set_point(y);
      return out;
    }
  }
  // phi(nu) is convex with phi'(nu) = |<x, y_nu>|^2 - c^2; bisect on its sign.
  auto rising = [&](Real nu) {
    const Real t = secular_root(lam, w2, lam_star, total, nu);
    if (t < top) return false;
    return overlap2(t).second >= c2;
  };
  const Real nu_hi = (top - xhx) / (1.0 - c2);
  if (wt > 0 && rising(1e-16 * nu_hi)) {
    out.value = top;
    Vector y = Vector::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k)
      if (lam(k) >= top - top_tol) y(k) = w(k);
    set_point(y);
    return out;
  }
  const Real nu = bisect_predicate(rising, 0.0, nu_hi, 200).second;
  const Real t = secular_root(lam, w2, lam_star, total, nu);
  out.value = std::max(top, t) - nu * c2;
  if (t >= top) set_point(resolvent(t));
  return out;
}

PreimageProbe probe_preimage(const BoundaryModel& m, Complex z, const UnitVector& x, const ProbeConfig& cfg) {
  cfg.validate();
  PreimageProbe out;
  out.x = x;
  const std::vector<Real> deltas = cfg.deltas();
  const std::vector<Complex> poly = convex_hull(m.polygon());
  const Real r0 = deltas.front() * m.diameter();
  const Real margin = probe_margin(m);

  // Relative neighbourhood of z: the disk of radius r0 clipped to the scanned range.
  std::vector<Complex> tests;
  for (int j = 0; j < cfg.coverage_resolution; ++j) {
    const Complex d = std::polar(1.0, kTwoPi * j / cfg.coverage_resolution);
    const Real t = poly.size() >= 3 ? std::min(r0, ray_exit(poly, z, d)) : 0.0;
    tests.push_back(z + t * d);
  }
  for (Complex v : poly)
    if (std::abs(v - z) <= r0) tests.push_back(v);

  const int k = cfg.support_grid;
  const Real h = kTwoPi / k;
  for (std::size_t e = 0; e < cfg.eps_list.size(); ++e) {
    EpsRecord rec;
    rec.eps = cfg.eps_list[e];
    const std::uint64_t seed = cfg.seed + 0x9e3779b97f4a7c15ULL * (e + 1);
    const std::vector<Complex> cloud = cap_image(m.a, x, rec.eps, cfg.samples_per_eps, seed);
    rec.convexity_defect = convexity_defect(cloud, 2048, seed ^ 0xc0ffeeULL);

    std::vector<Real> hs(static_cast<std::size_t>(k));
    std::vector<Complex> rim;
    for (int i = 0; i < k; ++i) {
      const CapSupport s = cap_support(m.a, x, rec.eps, i * h);
      hs[static_cast<std::size_t>(i)] = s.value;
      if (s.has_point) rim.push_back(s.point);
    }
    std::vector<Complex> aug = cloud;
    aug.insert(aug.end(), rim.begin(), rim.end());
    rec.delta_max_covered = delta_coverage(m, z, aug, cfg);

    // Exact deficit: max_theta Re(e^{-i theta} q) - h(theta), refined near the grid maximum.
    struct Hit {
      Real d;
      int i;
      std::size_t q;
    };
    std::vector<Hit> hits;
    for (std::size_t q = 0; q < tests.size(); ++q) {
      Hit best{-std::numeric_limits<Real>::infinity(), 0, q};
      for (int i = 0; i < k; ++i) {
        const Real d = (std::polar(1.0, -i * h) * tests[q]).real() - hs[static_cast<std::size_t>(i)];
        if (d > best.d) best = {d, i, q};
      }
      hits.push_back(best);
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& p, const Hit& q) { return p.d > q.d; });
    Real deficit = hits.empty() ? 0.0 : hits.front().d;
    if (deficit <= margin) {
      const Real near = 1e-3 * (1 + m.norm2);
      for (std::size_t j = 0; j < hits.size() && j < 16 && hits[j].d > -near; ++j) {
        const Complex q = tests[hits[j].q];
        auto neg = [&](Real th) { return cap_support(m.a, x, rec.eps, th).value - (std::polar(1.0, -th) * q).real(); };
        const MinResult r = golden_min(neg, hits[j].i * h - h, hits[j].i * h + h, 1e-10);
        deficit = std::max(deficit, -r.fx);
      }
    }
    rec.deficit = std::max(0.0, deficit);

    // Sampling noise: spread of the hull deficit over 8 disjoint splits.
    auto hull_deficit = [&](const std::vector<Complex>& pts) {
      const std::vector<Complex> hull = convex_hull(pts);
      Real d = 0.0;
      for (Complex q : tests) d = std::max(d, distance_to_convex(hull, q));
      return d;
    };
    std::vector<Real> split(8);
    for (int s = 0; s < 8; ++s) {
      std::vector<Complex> pts = rim;
      for (std::size_t i = static_cast<std::size_t>(s); i < cloud.size(); i += 8) pts.push_back(cloud[i]);
      split[static_cast<std::size_t>(s)] = hull_deficit(pts);
    }
    const Real mean = std::accumulate(split.begin(), split.end(), 0.0) / 8;
    Real var = 0.0;
    for (Real v : split) var += (v - mean) * (v - mean);
    rec.noise = std::sqrt(var / 7);
    rec.relative_nbhd_covered = rec.deficit <= margin && rec.delta_max_covered > 0;
    out.records.push_back(rec);
  }

  const bool all = std::all_of(out.records.begin(), out.records.end(), [](const EpsRecord& r) { return r.relative_nbhd_covered; });
  const EpsRecord& last = out.records.back();
  if (all)
    out.verdict = ProbeVerdict::Open;
  else if (!last.relative_nbhd_covered && last.deficit > margin + 3 * last.noise)
    out.verdict = ProbeVerdict::NotOpen;
  else
    out.verdict = ProbeVerdict::Inconclusive;
  return out;
}

ProbeReport openness_verdict(const BoundaryModel& m, Complex z, const ProbeConfig& cfg) {
  cfg.validate();
  ProbeReport rep;
  rep.z = z;
  rep.r0 = cfg.deltas().front() * m.diameter();
  rep.margin = probe_margin(m);
  const Real tol = 1e-10 * (1 + m.norm2);
  const Real bmargin = 1e-6 * (1 + m.norm2);

  std::vector<std::pair<UnitVector, std::string>> xs;
  auto add = [&](const UnitVector& x, const std::string& how) {
    for (const auto& p : xs)
      if (std::abs(p.first.components.dot(x.components)) > 1 - 1e-8) return;
    xs.emplace_back(x, how);
  };
  if (m.degenerate) {
    add(preimage(m, z, tol).x, "two_by_two_reduction");
  } else {
    const SupportGap g = support_gap(m, z);
    if (g.gap < -bmargin) throw OutsideRange("point outside the numerical range");
    if (g.gap <= bmargin) {
      const Real th = tangency_angle(m, z, g.theta);
      for (const auto& b : boundary_preimages(m.a, th, m.gap_tol))
        if (b.residual <= bmargin) add(b.x, to_string(b.construction));
    }
    for (int k = 0; k < 4; ++k) {
      PreimageOptions po;
      po.seed = cfg.seed;
      po.chord_offset = k % 2 ? kPi / 2 : 0.0;
      po.last_root = k >= 2;
      try {
        const PreimageResult r = preimage(m, z, std::max(tol, g.gap <= bmargin ? bmargin : tol), po);
        add(r.x, to_string(r.construction));
      } catch (const Error&) {
        if (xs.empty()) throw;
      }
    }
  }

  std::size_t open = 0, closed = 0;
  for (const auto& [x, how] : xs) {
    PreimageProbe p = probe_preimage(m, z, x, cfg);
    p.construction = how;
    open += p.verdict == ProbeVerdict::Open;
    closed += p.verdict == ProbeVerdict::NotOpen;
    rep.preimages.push_back(std::move(p));
  }
  const std::size_t n = rep.preimages.size();
  rep.verdict = closed > 0 ? ProbeVerdict::NotOpen : (open == n ? ProbeVerdict::Open : ProbeVerdict::Inconclusive);
  rep.weak_verdict = open > 0 ? ProbeVerdict::Open : (closed == n ? ProbeVerdict::NotOpen : ProbeVerdict::Inconclusive);
  return rep;
}

}  // namespace nrange
