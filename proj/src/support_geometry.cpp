#include "nrange/support_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nrange/planar.hpp"
#include "nrange/search.hpp"

namespace nrange {

Real default_gap_tol(const Matrix& a) { return 1e-8 * (1.0 + a.norm()); }
Real default_flat_tol(const Matrix& a) { return 1e-6 * (1.0 + spectral_norm(a)); }

const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::Arc: return "arc";
    case SegmentKind::Flat: return "flat";
    case SegmentKind::Corner: return "corner";
  }
  return "arc";
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::Inside: return "inside";
    case Membership::Boundary: return "boundary";
    case Membership::Outside: return "outside";
  }
  return "outside";
}

SupportSample support_value(const Matrix& a, Real theta, Real gap_tol) {
  validate_square(a);
  if (gap_tol <= 0.0) gap_tol = default_gap_tol(a);
  const TopEigenspace top = top_eigenspace(cartesian_part(a, theta, Part::Real), gap_tol);
  const Eigen::Index n = top.eigenvalues.size();
  SupportSample s;
  s.theta = theta;
  s.mu = top.eigenvalues(n - 1);
  s.multiplicity = static_cast<int>(top.vectors.cols());
  s.eigenbasis = top.vectors;
  s.essential_like = 2 * s.multiplicity > n;
  return s;
}

std::vector<SlopeGroup> slope_groups(const Matrix& a, const SupportSample& s, Real flat_tol) {
  const Matrix im = cartesian_part(a, s.theta, Part::Imaginary);
  if (s.multiplicity == 1) {
    const Real slope = s.eigenbasis.col(0).dot(im * s.eigenbasis.col(0)).real();
    return {SlopeGroup{slope, 1, s.eigenbasis}};
  }
  Matrix k = s.eigenbasis.adjoint() * im * s.eigenbasis;
  k = (k + k.adjoint()) * 0.5;
  const SpectralDecomposition sd = hermitian_eig(k);
  std::vector<SlopeGroup> out;
  Eigen::Index start = 0;
  for (Eigen::Index j = 1; j <= sd.size(); ++j) {
    if (j == sd.size() || sd.eigenvalues(j) - sd.eigenvalues(j - 1) > flat_tol) {
      const Eigen::Index cnt = j - start;
      SlopeGroup g;
      g.slope = sd.eigenvalues.segment(start, cnt).mean();
      g.multiplicity = static_cast<int>(cnt);
      g.basis = s.eigenbasis * sd.eigenvectors.middleCols(start, cnt);
      out.push_back(std::move(g));
      start = j;
    }
  }
  return out;
}

Complex boundary_point(const Matrix& a, Real theta, bool leaving, Real gap_tol, Real flat_tol) {
  const SupportSample s = support_value(a, theta, gap_tol);
  const auto g = slope_groups(a, s, flat_tol);
  return support_point(theta, s.mu, leaving ? g.back().slope : g.front().slope);
}

std::vector<Complex> BoundaryModel::polygon() const {
  std::vector<Complex> out;
  const Real tol = 10.0 * point_tol();
  for (const auto& v : vertices) {
    if (out.empty() || std::abs(v.z - out.back()) > tol) out.push_back(v.z);
  }
  while (out.size() > 1 && std::abs(out.front() - out.back()) <= tol) out.pop_back();
  return out;
}

Real BoundaryModel::diameter() const { return nrange::diameter(polygon()); }

namespace {

Real top_gap(const Matrix& a, Real theta) {
  const RealVector ev = hermitian_eigenvalues(cartesian_part(a, theta, Part::Real));
  const Eigen::Index n = ev.size();
  if (n < 2) return std::numeric_limits<Real>::infinity();
  return ev(n - 1) - ev(n - 2);
}

Real top_mu(const Matrix& a, Real theta) {
  return hermitian_eigenvalues(cartesian_part(a, theta, Part::Real)).maxCoeff();
}

Real wrap_angle(Real t) {
  t = std::fmod(t, kTwoPi);
  return t < 0 ? t + kTwoPi : t;
}

bool collinear(const std::vector<Complex>& pts, Real tol) {
  if (pts.size() <= 1) return true;
  const std::vector<Complex> hull = convex_hull(pts);
  if (hull.size() <= 2) return true;
  std::size_t bi = 0, bj = 0;
  Real best = -1.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j)
      if (std::abs(hull[i] - hull[j]) > best) {
        best = std::abs(hull[i] - hull[j]);
        bi = i;
        bj = j;
      }
  if (best <= tol) return true;
  const Complex d = (hull[bj] - hull[bi]) / best;
  for (Complex p : hull)
    if (std::abs(cross(d, p - hull[bi])) > tol) return false;
  return true;
}

struct IntervalEvent {
  bool flat = false;
  FlatPortion flat_portion;
  bool singular = false;
  SingularPoint singular_point;
};

}  // namespace

BoundaryModel boundary_scan(const Matrix& a, int grid_size, ScanTolerances tol) {
  validate_square(a);
  if (grid_size < 64) throw InvalidInput("boundary_scan: grid_size must be >= 64");
  BoundaryModel m;
  m.a = a;
  m.grid_size = grid_size;
  m.norm2 = spectral_norm(a);
  m.normf = a.norm();
  m.gap_tol = tol.gap_tol > 0 ? tol.gap_tol : default_gap_tol(a);
  m.flat_tol = tol.flat_tol > 0 ? tol.flat_tol : default_flat_tol(a);
  const int n = grid_size;
  const Real h = m.grid_step();
  const Real ptol = 10.0 * m.point_tol();

  m.samples.resize(n);
  m.slopes.resize(n);
  std::vector<Complex> p_in(n), p_out(n);
  for (int k = 0; k < n; ++k) {
    const Real theta = k * h;
    m.samples[k] = support_value(a, theta, m.gap_tol);
    m.slopes[k] = slope_groups(a, m.samples[k], m.flat_tol);
    p_in[k] = support_point(theta, m.samples[k].mu, m.slopes[k].front().slope);
    p_out[k] = support_point(theta, m.samples[k].mu, m.slopes[k].back().slope);
  }

  {
    std::vector<Complex> raw(p_in);
    raw.insert(raw.end(), p_out.begin(), p_out.end());
    m.degenerate = collinear(raw, ptol);
  }

  auto single = [&](int k) { return m.slopes[k].size() == 1; };
  auto same = [&](int k, int j) { return single(k) && single(j) && std::abs(p_out[k] - p_in[j]) <= ptol; };

  // Events strictly between consecutive grid angles.
  std::vector<IntervalEvent> events(n);
  std::vector<bool> grid_singular(n, false);
  if (!m.degenerate) {
    std::vector<Real> lens(n);
    for (int k = 0; k < n; ++k) lens[k] = std::abs(p_in[(k + 1) % n] - p_out[k]);
    for (int k = 0; k < n; ++k) {
      const int next = (k + 1) % n;
      const Real ta = k * h;
      const Real tb = ta + h;
      const Complex jump = p_in[next] - p_out[k];
      const Real len = lens[k];
      // Along a smooth arc consecutive chords have similar length; only a jump
      // that stands out from a neighbour can hide a flat.
      const Real neighbour = std::min(lens[(k + n - 1) % n], lens[next]);
      bool candidate = false;
      if (len > ptol && len > 1.25 * neighbour) {
        const Real phi = std::arg(-kI * jump);
        const Real d = top_mu(a, phi) - (std::polar(1.0, -phi) * p_out[k]).real();
        if (d <= len * h / 32.0 + m.point_tol()) candidate = true;
      }
      if (!candidate && m.samples[k].multiplicity == 1 && m.samples[next].multiplicity == 1) {
        const Real overlap = std::abs(m.samples[k].eigenbasis.col(0).dot(m.samples[next].eigenbasis.col(0)));
        if (overlap < 0.9) candidate = true;
      }
      if (!candidate) continue;
      const MinResult r = golden_min([&](Real t) { return top_gap(a, t); }, ta, tb);
      if (r.fx > m.gap_tol || r.x <= ta || r.x >= tb) continue;
      const SupportSample s = support_value(a, r.x, m.gap_tol);
      const auto groups = slope_groups(a, s, m.flat_tol);
      if (groups.size() >= 2) {
        FlatPortion f;
        f.theta0 = wrap_angle(r.x);
        f.slopes = {groups.front().slope, groups.back().slope};
        f.endpoints = {support_point(r.x, s.mu, f.slopes[0]), support_point(r.x, s.mu, f.slopes[1])};
        f.multiplicity = s.multiplicity;
        f.essential_like = s.essential_like;
        events[k].flat = true;
        events[k].flat_portion = f;
      } else if (s.multiplicity >= 2) {
        events[k].singular = true;
        events[k].singular_point = {support_point(r.x, s.mu, groups.front().slope), wrap_angle(r.x),
                                    s.multiplicity};
      }
    }
    for (int k = 0; k < n; ++k) {
      const int prev = (k + n - 1) % n;
      const int next = (k + 1) % n;
      if (m.slopes[k].size() == 1 && m.samples[k].multiplicity >= 2 && m.samples[prev].multiplicity == 1 &&
          m.samples[next].multiplicity == 1)
        grid_singular[k] = true;
    }
  }

  // Corner runs: consecutive grid samples sharing one support point.
  std::vector<int> corner_of(n, -1);
  if (!m.degenerate) {
    int s0 = -1;
    for (int k = 0; k < n; ++k)
      if (!same((k + n - 1) % n, k)) {
        s0 = k;
        break;
      }
    if (s0 >= 0) {
      int j = 0;
      while (j < n) {
        const int start = (s0 + j) % n;
        int count = 1;
        while (j + count < n && same((s0 + j + count - 1) % n, (s0 + j + count) % n)) ++count;
        if (count >= 10 && single(start)) {
          const Complex z = p_in[start];
          const int last = (start + count - 1) % n;
          const int before = (start + n - 1) % n;
          const int after = (last + 1) % n;
          const Real t_start = start * h;
          const Real t_last = t_start + (count - 1) * h;
          Real th1 = t_start - h;
          if (std::abs(p_out[before] - z) > ptol) {
            auto hit = [&](Real t) { return std::abs(boundary_point(a, t, true, m.gap_tol, m.flat_tol) - z) <= ptol; };
            th1 = bisect_predicate(hit, t_start - h, t_start, 50).second;
          }
          Real th2 = t_last + h;
          if (std::abs(p_in[after] - z) > ptol) {
            auto miss = [&](Real t) { return std::abs(boundary_point(a, t, false, m.gap_tol, m.flat_tol) - z) > ptol; };
            th2 = bisect_predicate(miss, t_last, t_last + h, 50).first;
          }
          if (th2 - th1 > 10.0 * h) {
            const int id = static_cast<int>(m.corners.size());
            m.corners.push_back({z, wrap_angle(th1), wrap_angle(th1) + (th2 - th1)});
            for (int c = 0; c < count; ++c) corner_of[(start + c) % n] = id;
          }
        }
        j += count;
      }
    }
  }

  // Assemble the CCW vertex list.
  std::vector<bool> corner_emitted(m.corners.size(), false);
  std::vector<bool> separator;
  auto push = [&](BoundaryVertex v, bool sep) {
    m.vertices.push_back(v);
    separator.push_back(sep);
  };
  for (int k = 0; k < n; ++k) {
    const Real theta = k * h;
    const SupportSample& s = m.samples[k];
    if (corner_of[k] >= 0) {
      const int c = corner_of[k];
      if (!corner_emitted[c]) {
        corner_emitted[c] = true;
        const CornerPoint& cp = m.corners[c];
        const Real tm = wrap_angle(0.5 * (cp.theta1 + cp.theta2));
        push({tm, (std::polar(1.0, -tm) * cp.z).real(), cp.z, 1, SegmentKind::Corner, k}, true);
      }
    } else if (!m.degenerate && m.slopes[k].size() >= 2) {
      FlatPortion f;
      f.theta0 = theta;
      f.slopes = {m.slopes[k].front().slope, m.slopes[k].back().slope};
      f.endpoints = {p_in[k], p_out[k]};
      f.multiplicity = s.multiplicity;
      f.essential_like = s.essential_like;
      m.flats.push_back(f);
      push({theta, s.mu, p_in[k], s.multiplicity, SegmentKind::Flat, k}, true);
      push({theta, s.mu, p_out[k], s.multiplicity, SegmentKind::Flat, k}, true);
    } else {
      if (grid_singular[k]) m.singular_points.push_back({p_in[k], theta, s.multiplicity});
      push({theta, s.mu, p_in[k], s.multiplicity, SegmentKind::Arc, k}, grid_singular[k]);
      if (m.degenerate && std::abs(p_out[k] - p_in[k]) > ptol)
        push({theta, s.mu, p_out[k], s.multiplicity, SegmentKind::Arc, k}, false);
    }
    const IntervalEvent& ev = events[k];
    if (ev.flat) {
      const FlatPortion& f = ev.flat_portion;
      m.flats.push_back(f);
      const Real mu = (std::polar(1.0, -f.theta0) * f.endpoints[0]).real();
      push({f.theta0, mu, f.endpoints[0], f.multiplicity, SegmentKind::Flat, -1}, true);
      push({f.theta0, mu, f.endpoints[1], f.multiplicity, SegmentKind::Flat, -1}, true);
    } else if (ev.singular) {
      const SingularPoint& sp = ev.singular_point;
      m.singular_points.push_back(sp);
      push({sp.theta, (std::polar(1.0, -sp.theta) * sp.z).real(), sp.z, sp.multiplicity, SegmentKind::Arc, -1},
           true);
    }
  }

  // Arcs: maximal cyclic runs of non-separator vertices.
  if (!m.degenerate) {
    const int nv = static_cast<int>(m.vertices.size());
    int first_sep = -1;
    for (int i = 0; i < nv; ++i)
      if (separator[i]) {
        first_sep = i;
        break;
      }
    auto make_arc = [&](const std::vector<int>& idx) {
      if (idx.empty()) return;
      Arc arc;
      arc.theta_begin = m.vertices[idx.front()].theta;
      arc.theta_end = m.vertices[idx.back()].theta;
      if (arc.theta_end < arc.theta_begin) arc.theta_end += kTwoPi;
      arc.first_sample = m.vertices[idx.front()].sample;
      arc.last_sample = m.vertices[idx.back()].sample;
      m.arcs.push_back(arc);
    };
    if (first_sep < 0) {
      std::vector<int> all(nv);
      for (int i = 0; i < nv; ++i) all[i] = i;
      make_arc(all);
    } else {
      std::vector<int> cur;
      for (int j = 1; j <= nv; ++j) {
        const int i = (first_sep + j) % nv;
        if (separator[i] || m.vertices[i].sample < 0) {
          make_arc(cur);
          cur.clear();
        } else {
          cur.push_back(i);
        }
      }
    }
  }
  return m;
}

Real default_iso_tol(const BoundaryModel& m) { return 1e-6 * (1.0 + m.norm2); }

ExtremePointSet extreme_points(const BoundaryModel& m, Real iso_tol) {
  ExtremePointSet out;
  const Real ptol = 10.0 * m.point_tol();
  const std::vector<Complex> hull = convex_hull(m.polygon(), ptol);
  int on_arc_count = 0;
  for (Complex z : hull) {
    int grid_hits = 0;
    bool corner = false;
    for (const auto& v : m.vertices) {
      if (std::abs(v.z - z) > ptol) continue;
      if (v.kind == SegmentKind::Corner) corner = true;
      ++grid_hits;
    }
    // Count distinct sample hits to catch vertices supported across several grid angles.
    int sample_hits = 0;
    for (std::size_t k = 0; k < m.samples.size(); ++k) {
      const Real th = static_cast<Real>(k) * m.grid_step();
      const Real gap = m.samples[k].mu - (std::polar(1.0, -th) * z).real();
      if (std::abs(gap) <= ptol) ++sample_hits;
    }
    int flat_ends = 0;
    for (const auto& f : m.flats)
      if (std::abs(f.endpoints[0] - z) <= ptol || std::abs(f.endpoints[1] - z) <= ptol) ++flat_ends;
    ExtremePoint e;
    e.z = z;
    e.on_arc = !(corner || sample_hits >= 2 || flat_ends >= 2);
    (void)grid_hits;
    if (e.on_arc) ++on_arc_count;
    out.points.push_back(e);
  }
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    Real nearest = std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < out.points.size(); ++j)
      if (i != j) nearest = std::min(nearest, std::abs(out.points[i].z - out.points[j].z));
    out.points[i].is_isolated = nearest > iso_tol && !out.points[i].on_arc;
  }
  out.continuum = static_cast<int>(hull.size()) >= m.grid_size || 2 * on_arc_count >= m.grid_size;
  return out;
}

SupportGap support_gap(const BoundaryModel& m, Complex z) {
  const Real h = m.grid_step();
  SupportGap best{std::numeric_limits<Real>::infinity(), 0.0};
  for (std::size_t k = 0; k < m.samples.size(); ++k) {
    const Real th = static_cast<Real>(k) * h;
    const Real d = m.samples[k].mu - (std::polar(1.0, -th) * z).real();
    if (d < best.gap) best = {d, th};
  }
  for (const auto& f : m.flats) {
    const Real mu = (std::polar(1.0, -f.theta0) * f.endpoints[0]).real();
    const Real d = mu - (std::polar(1.0, -f.theta0) * z).real();
    if (d < best.gap) best = {d, f.theta0};
  }
  auto gap = [&](Real t) { return top_mu(m.a, t) - (std::polar(1.0, -t) * z).real(); };
  const MinResult r = golden_min(gap, best.theta - h, best.theta + h, 1e-12);
  if (r.fx < best.gap) best = {r.fx, wrap_angle(r.x)};
  return best;
}

Membership hull_contains(const BoundaryModel& m, Complex z, Real margin) {
  if (m.degenerate) throw DegenerateNumericalRange("numerical range has empty interior");
  const SupportGap g = support_gap(m, z);
  if (g.gap > margin) return Membership::Inside;
  if (g.gap >= -margin) return Membership::Boundary;
  return Membership::Outside;
}

Real supporting_angle(const BoundaryModel& m, Complex z) { return support_gap(m, z).theta; }

Real tangency_angle(const BoundaryModel& m, Complex z, Real theta0) {
  // The gap minimization pins the angle only to about sqrt(eps).
  auto ahead = [&](Real th) {
    const Complex p = boundary_point(m.a, th, true, m.gap_tol, m.flat_tol);
    return (std::polar(1.0, -th) * (p - z)).imag() > 0;
  };
  const Real h = 2 * m.grid_step();
  if (ahead(theta0 - h) || !ahead(theta0 + h)) return theta0;
  const auto [lo, hi] = bisect_predicate(ahead, theta0 - h, theta0 + h, 200);
  return 0.5 * (lo + hi);
}

}  // namespace nrange
