#include "nrange/classifier.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "nrange/inverse_map.hpp"
#include "nrange/planar.hpp"

namespace nrange {

const char* to_string(Location l) {
  switch (l) {
    case Location::Interior: return "interior";
    case Location::BoundaryArc: return "boundary-arc";
    case Location::Corner: return "corner";
    case Location::FlatInterior: return "flat-interior";
    case Location::FlatEndpoint: return "flat-endpoint";
  }
  return "?";
}

const char* to_string(Case c) {
  switch (c) {
    case Case::I: return "I";
    case Case::II: return "II";
    case Case::III: return "III";
    case Case::NotApplicable: return "not-applicable";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Strong: return "strong";
    case Verdict::WeakOnly: return "weak_only";
    case Verdict::FailsWeak: return "fails_weak";
    case Verdict::Undecidable: return "undecidable";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::Strong, Verdict::WeakOnly, Verdict::FailsWeak, Verdict::Undecidable})
    if (s == to_string(v)) return v;
  throw InvalidInput("unknown verdict: " + s);
}

namespace {

// Distinct maximal curves through z from a local tracking window centred on theta0.
int local_curve_count(const BoundaryModel& m, Complex z, Real theta0, int mult, const ClassifyOptions& opt,
                      Real curve_tol) {
  TrackOptions to;
  to.gap_tol = m.gap_tol;
  to.flat_tol = m.flat_tol;
  const int grid = std::max(65, opt.window_grid | 1);
  const BranchTracking t = track_branches(m.a, theta0 - opt.window, theta0 + opt.window, grid,
                                          std::min<int>(mult + 1, static_cast<int>(m.a.rows())), to);
  const CurvesThrough ct = curves_through(t.branches, z, curve_tol);
  const Real step = 2 * opt.window / (grid - 1);
  auto branch = [&](int id) -> const CriticalBranch& { return t.branches[static_cast<std::size_t>(id)]; };
  // Coinciding branches (identical eigenvalue curves) trace the same curve.
  auto same_curve = [&](int i, int j) {
    const CriticalBranch& a = branch(i);
    const CriticalBranch& b = branch(j);
    const int lo = std::max(a.grid_offset, b.grid_offset);
    const int hi = std::min(a.grid_offset + static_cast<int>(a.size()), b.grid_offset + static_cast<int>(b.size()));
    if (hi - lo < 3) return false;
    for (int g = lo; g < hi; ++g)
      if (std::abs(a.lambda[g - a.grid_offset] - b.lambda[g - b.grid_offset]) > 10 * m.gap_tol) return false;
    return true;
  };
  std::vector<std::size_t> kept;
  for (std::size_t p = 0; p < ct.branch_ids.size(); ++p) {
    bool dup = false;
    for (std::size_t q : kept)
      if (std::abs(ct.thetas[p] - ct.thetas[q]) <= 10 * step && same_curve(ct.branch_ids[p], ct.branch_ids[q])) dup = true;
    if (!dup) kept.push_back(p);
  }
  return static_cast<int>(kept.size());
}

// Largest cosine between the top eigenspaces at theta0 -+ delta.
Real side_overlap(const BoundaryModel& m, Real theta0, Real delta) {
  const TopEigenspace lo = top_eigenspace(cartesian_part(m.a, theta0 - delta, Part::Real), m.gap_tol);
  const TopEigenspace hi = top_eigenspace(cartesian_part(m.a, theta0 + delta, Part::Real), m.gap_tol);
  const Matrix c = lo.vectors.adjoint() * hi.vectors;
  return Eigen::JacobiSVD<Matrix>(c).singularValues()(0);
}

}  // namespace

ClassificationReport classify_point(const BoundaryModel& m, Complex z, const std::vector<CriticalBranch>& branches,
                                    const ClassifyOptions& opt) {
  ClassificationReport r;
  r.z = z;
  ClassificationTolerances& tol = r.tolerances;
  tol.margin = opt.margin > 0 ? opt.margin : 1e-6 * (1 + m.norm2);
  tol.iso_tol = opt.iso_tol > 0 ? opt.iso_tol : default_iso_tol(m);
  tol.gap_tol = m.gap_tol;
  tol.flat_tol = m.flat_tol;
  tol.curve_tol = opt.curve_tol > 0 ? opt.curve_tol : 1e-6 * (1 + m.norm2);
  tol.metadata_tol = opt.metadata_tol * (1 + m.norm2);
  Evidence& ev = r.evidence;

  if (m.degenerate) {
    const auto pts = m.polygon();
    const Real d = pts.size() <= 1 ? std::abs(z - pts.front()) : point_segment_distance(z, pts.front(), pts.back());
    if (d > tol.margin) throw OutsideRange("point outside the numerical range");
    r.location = Location::BoundaryArc;
    r.rule = "degenerate-range";
    ev.note = "numerical range has empty interior";
    return r;
  }

  const SupportGap g = support_gap(m, z);
  ev.support_gap = g.gap;
  ev.support_angle = g.theta;
  if (g.gap < -tol.margin) throw OutsideRange("point outside the numerical range");
  if (g.gap > tol.margin) {
    r.location = Location::Interior;
    r.verdict = Verdict::Strong;
    r.rule = "interior-point";
    return r;
  }

  // Locate z on the boundary.
  Real theta = g.theta;
  r.location = Location::BoundaryArc;
  for (const auto& f : m.flats) {
    if (point_segment_distance(z, f.endpoints[0], f.endpoints[1]) > tol.margin) continue;
    theta = f.theta0;
    const bool end = std::min(std::abs(z - f.endpoints[0]), std::abs(z - f.endpoints[1])) <= tol.margin;
    r.location = end ? Location::FlatEndpoint : Location::FlatInterior;
    if (!end) break;
  }
  for (const auto& c : m.corners) {
    if (std::abs(z - c.z) > tol.margin) continue;
    r.location = Location::Corner;
    theta = 0.5 * (c.theta1 + c.theta2);
    break;
  }
  if (r.location == Location::BoundaryArc) theta = tangency_angle(m, z, g.theta);
  ev.support_angle = theta;

  const SupportSample s = support_value(m.a, theta, m.gap_tol);
  ev.multiplicity = s.multiplicity;
  ev.essential_like = s.essential_like;
  for (const auto& sg : slope_groups(m.a, s, m.flat_tol)) ev.slopes.push_back(sg.slope);
  ev.normal = is_normal(m.a, tol.normal_tol);
  ev.preimage_rank = boundary_preimages(m.a, theta, m.gap_tol).front().span_projector_rank;

  const std::optional<GalleryMetadata>& md = opt.metadata;
  const ResolvedPoint* resolved = nullptr;
  if (md) {
    for (Complex p : md->declared_limit_extreme_points) ev.declared_limit = ev.declared_limit || std::abs(p - z) <= tol.metadata_tol;
    for (const auto& rp : md->resolved_points)
      if (std::abs(rp.z - z) <= tol.metadata_tol) resolved = &rp;
    if (md->essential_range) {
      ev.essential_contains = md->essential_range->contains(z, tol.metadata_tol);
      ev.essential_meets_line = md->essential_range->meets_line(theta, s.mu, tol.metadata_tol);
    }
  }
  ev.metadata_resolved = resolved != nullptr;
  if (!branches.empty()) ev.tracked_curve_count = curves_through(branches, z, tol.curve_tol).count;

  if (r.location != Location::FlatInterior) {
    const ExtremePointSet eps = extreme_points(m, tol.iso_tol);
    std::size_t best = eps.points.size();
    Real bd = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < eps.points.size(); ++i) {
      const Real d = std::abs(eps.points[i].z - z);
      if (d < bd) bd = d, best = i;
    }
    if (best < eps.points.size() && bd <= 10 * tol.margin) {
      ev.isolated = eps.points[best].is_isolated;
      Real other = std::numeric_limits<Real>::infinity();
      for (std::size_t i = 0; i < eps.points.size(); ++i)
        if (i != best) other = std::min(other, std::abs(eps.points[i].z - z));
      ev.nearest_extreme = std::isfinite(other) ? other : -1.0;
    }
    if (ev.declared_limit) ev.isolated = false;
  }

  // Decision tree; the order is part of the contract.
  if (r.location == Location::FlatInterior && !ev.essential_contains) {
    r.verdict = Verdict::Strong;
    r.rule = "flat-interior";
    return r;
  }
  if (ev.isolated && !ev.essential_contains) {
    r.verdict = Verdict::Strong;
    r.rule = "isolated-extreme-point";
    return r;
  }
  if (ev.normal) {
    r.verdict = Verdict::FailsWeak;
    r.rule = "normal-limit-of-extreme-points";
    if (!ev.declared_limit) ev.note = "isolation judged at iso_tol only; a finite section has no genuine limit points";
    return r;
  }
  if (ev.essential_contains) {
    r.rule = "boundary-point-in-essential-range";
    ev.note = "the declared essential range contains z; conditions there are open";
    return r;
  }
  if (resolved) {
    r.verdict = verdict_from_string(resolved->verdict);
    r.rule = "metadata-resolved";
    ev.note = resolved->reason;
    return r;
  }
  if (ev.essential_like || ev.essential_meets_line) {
    r.rule = "maximal-eigenvalue-not-isolated";
    ev.note = ev.essential_like ? "top eigenspace exceeds half the dimension" : "declared essential range meets the support line";
    return r;
  }

  if (s.multiplicity == 1 && r.location != Location::FlatEndpoint) {
    ev.curve_count = 1;
    ev.note = "simple maximal eigenvalue";
  } else {
    ev.curve_count = local_curve_count(m, z, theta, s.multiplicity, opt, tol.curve_tol);
  }
  const Case single = r.location == Location::FlatEndpoint ? Case::II : Case::I;
  if (ev.curve_count == 1) {
    r.kase = single;
    r.verdict = Verdict::Strong;
    r.rule = "single-critical-curve";
    return r;
  }
  if (ev.curve_count == 0) {
    r.rule = "no-critical-curve-located";
    ev.note = "no maximal branch passes within curve_tol";
    return r;
  }
  if (r.location == Location::FlatEndpoint) {
    r.kase = Case::II;
    r.verdict = Verdict::WeakOnly;
    r.rule = "flat-endpoint-several-curves";
    return r;
  }
  ev.side_overlap = side_overlap(m, theta, 8 * opt.window / (opt.window_grid - 1));
  if (ev.side_overlap >= 0.9) {
    r.kase = Case::I;
    r.verdict = Verdict::WeakOnly;
    r.rule = "analytic-boundary-several-curves";
  } else if (ev.side_overlap <= 0.1) {
    r.kase = Case::III;
    r.verdict = Verdict::FailsWeak;
    r.rule = "curved-arcs-meet";
  } else {
    r.rule = "case-ambiguous";
    ev.note = "maximal eigenvectors on either side neither coincide nor separate";
  }
  return r;
}

BoundaryClassification classify_boundary(const BoundaryModel& m, const std::vector<CriticalBranch>& branches,
                                         const ClassifyOptions& opt) {
  BoundaryClassification out;
  if (m.degenerate) throw DegenerateNumericalRange("numerical range has empty interior");
  const Real dedupe = 1e-6 * (1 + m.norm2);
  std::vector<Complex> pts;
  auto add = [&](Complex z) {
    for (Complex p : pts)
      if (std::abs(p - z) <= dedupe) return;
    pts.push_back(z);
  };
  for (const auto& c : m.corners) add(c.z);
  for (const auto& f : m.flats) {
    add(f.endpoints[0]);
    add(f.endpoints[1]);
    add(0.5 * (f.endpoints[0] + f.endpoints[1]));
  }
  for (const auto& sp : m.singular_points) add(sp.z);
  std::vector<Complex> arc;
  for (const auto& v : m.vertices)
    if (v.kind == SegmentKind::Arc && v.sample >= 0) arc.push_back(v.z);
  const int k = std::min<int>(opt.arc_samples, static_cast<int>(arc.size()));
  for (int i = 0; i < k; ++i) add(arc[static_cast<std::size_t>(i) * arc.size() / k]);

  bool essential = opt.metadata && opt.metadata->essential_range.has_value();
  for (Complex z : pts) {
    ClassificationReport r;
    try {
      r = classify_point(m, z, branches, opt);
    } catch (const Error& e) {
      r.z = z;
      r.location = Location::BoundaryArc;
      r.rule = "error";
      r.evidence.note = std::string(e.kind()) + ": " + e.what();
    }
    essential = essential || r.evidence.essential_like;
    if (r.verdict == Verdict::WeakOnly || r.verdict == Verdict::FailsWeak) {
      ++out.non_strong;
      out.non_strong_points.push_back(z);
    } else if (r.verdict == Verdict::Undecidable) {
      ++out.undecidable;
    }
    out.reports.push_back(std::move(r));
  }
  out.finite = !essential;
  return out;
}

}  // namespace nrange
