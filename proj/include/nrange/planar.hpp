#pragma once

#include <vector>

#include "nrange/types.hpp"

namespace nrange {

inline Real cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// Counter-clockwise convex hull (Andrew's monotone chain). Points closer than
/// `dedupe_tol` are merged; collinear points are dropped.
std::vector<Complex> convex_hull(std::vector<Complex> points, Real dedupe_tol = 0.0);

/// h(theta) = max_v Re(e^{-i theta} v).
Real polygon_support(const std::vector<Complex>& points, Real theta);

Real point_segment_distance(Complex z, Complex a, Complex b);

/// Distance from z to a CCW convex polygon; zero inside.
Real distance_to_convex(const std::vector<Complex>& hull, Complex z);

/// Signed depth: positive inside (distance to the boundary), negative outside.
Real signed_depth(const std::vector<Complex>& hull, Complex z);

/// Hausdorff distance between two convex polygons given by their vertices.
Real hausdorff_convex(const std::vector<Complex>& p, const std::vector<Complex>& q);

Real diameter(const std::vector<Complex>& points);

}  // namespace nrange
