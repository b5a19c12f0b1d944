#include "nrange/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nrange {

std::vector<Complex> convex_hull(std::vector<Complex> pts, Real dedupe_tol) {
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  std::vector<Complex> uniq;
  for (Complex p : pts) {
    bool dup = false;
    // Points sorted by x: only the tail can be within tolerance.
    for (auto it = uniq.rbegin(); it != uniq.rend() && p.real() - it->real() <= dedupe_tol; ++it) {
      if (std::abs(p - *it) <= dedupe_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() < 3) return uniq;

  std::vector<Complex> hull(2 * uniq.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], uniq[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = uniq[i];
  }
  for (std::size_t i = uniq.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], uniq[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = uniq[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

Real polygon_support(const std::vector<Complex>& points, Real theta) {
  const Complex rot = std::polar(1.0, -theta);
  Real best = -std::numeric_limits<Real>::infinity();
  for (Complex p : points) best = std::max(best, (rot * p).real());
  return best;
}

Real point_segment_distance(Complex z, Complex a, Complex b) {
  const Complex d = b - a;
  const Real len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  const Real t = std::clamp(((z - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

namespace {

Real boundary_distance(const std::vector<Complex>& hull, Complex z) {
  if (hull.size() == 1) return std::abs(z - hull[0]);
  Real best = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    best = std::min(best, point_segment_distance(z, hull[i], hull[(i + 1) % hull.size()]));
  }
  return best;
}

bool inside_convex(const std::vector<Complex>& hull, Complex z) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (cross(hull[(i + 1) % hull.size()] - hull[i], z - hull[i]) < 0) return false;
  }
  return true;
}

}  // namespace

Real distance_to_convex(const std::vector<Complex>& hull, Complex z) {
  if (hull.empty()) return std::numeric_limits<Real>::infinity();
  if (inside_convex(hull, z)) return 0.0;
  return boundary_distance(hull, z);
}

Real signed_depth(const std::vector<Complex>& hull, Complex z) {
  if (hull.empty()) return -std::numeric_limits<Real>::infinity();
  const Real d = boundary_distance(hull, z);
  return inside_convex(hull, z) ? d : -d;
}

Real hausdorff_convex(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  // Distance to a convex set is convex, so the maximum over the other polygon sits at a vertex.
  Real h = 0.0;
  for (Complex v : p) h = std::max(h, distance_to_convex(q, v));
  for (Complex v : q) h = std::max(h, distance_to_convex(p, v));
  return h;
}

Real diameter(const std::vector<Complex>& points) {
  const std::vector<Complex> hull = convex_hull(points);
  Real d = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) d = std::max(d, std::abs(hull[i] - hull[j]));
  return d;
}

}  // namespace nrange
