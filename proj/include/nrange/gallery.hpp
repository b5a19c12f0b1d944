#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nrange/types.hpp"

namespace nrange {

/// Declared essential numerical range: finite point set and/or a closed disk.
struct EssentialRange {
  std::vector<Complex> points;
  std::optional<Complex> disk_center;
  Real disk_radius = 0.0;
  std::string description;

  /// Distance from the declared set to the line {z : Re(e^{-i theta} z) = mu}.
  bool meets_line(Real theta, Real mu, Real tol) const;
  bool contains(Complex z, Real tol) const;
};

/// A point whose verdict is fixed by an analytic argument outside the finite section.
struct ResolvedPoint {
  Complex z;
  std::string verdict;
  std::string reason;
};

struct GalleryMetadata {
  std::optional<EssentialRange> essential_range;
  std::vector<Complex> declared_limit_extreme_points;
  std::vector<ResolvedPoint> resolved_points;
  std::vector<Complex> expected_singular_points;
  std::string support_oracle;  // "" or "volterra"
  std::string branch_oracle;   // "" or "volterra"
  std::string notes;
};

struct GalleryOperator {
  Matrix matrix;
  std::string name;
  GalleryMetadata metadata;

  std::optional<Real> exact_support(Real theta) const;
  std::optional<Real> exact_branch(int n, Real theta) const;
};

/// lambda_n(theta) = sin(theta) / (2 theta + 2 n pi); the theta -> 0 limit at n = 0 is 1/2.
Real volterra_branch(int n, Real theta);
/// Supremum of the spectrum of Re(e^{-i theta}V): max(0, max_n lambda_n(theta)).
Real volterra_support(Real theta);
/// Boundary curve of W(V): ((1 - cos t) + i(t - sin t)) / t^2.
Complex volterra_boundary(Real t);

/// Index of the Fourier mode n in a section of size N.
inline Eigen::Index volterra_index(int n, int N) { return n + N; }

GalleryOperator volterra_section(int N);
GalleryOperator weighted_shift(const std::vector<Complex>& weights, bool cyclic);
GalleryOperator normal_diag(const std::vector<Complex>& values, const std::vector<Complex>& declared_limits);
GalleryOperator cjkls_block(Real b, Real k);
GalleryOperator direct_sum_scaled(int terms);

GalleryOperator nilpotent_2x2();
GalleryOperator square_diag();
GalleryOperator example1_diag(int K = 20);
GalleryOperator example2_diag(int count = 40);

struct GalleryEntry {
  std::string name;
  std::string params;
  std::string summary;
};
std::vector<GalleryEntry> gallery_list();

/// Builds a named operator; numeric parameters by key (n, b, k, m, w, cyclic).
GalleryOperator build_gallery(const std::string& name, const std::map<std::string, Real>& params);

}  // namespace nrange
