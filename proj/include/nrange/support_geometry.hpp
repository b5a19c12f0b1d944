#pragma once

#include <array>
#include <optional>
#include <vector>

#include "nrange/linalg.hpp"

namespace nrange {

struct SupportSample {
  Real theta = 0.0;
  Real mu = 0.0;
  int multiplicity = 1;
  Matrix eigenbasis;  // dim x multiplicity
  bool essential_like = false;
};

/// Eigenvalues of Im(e^{-i theta}A) compressed to the top eigenspace, clustered.
struct SlopeGroup {
  Real slope = 0.0;
  int multiplicity = 1;
  Matrix basis;  // dim x multiplicity, inside the top eigenspace
};

struct ScanTolerances {
  Real gap_tol = -1.0;   // <= 0: 1e-8 (1 + ||A||_F)
  Real flat_tol = -1.0;  // <= 0: 1e-6 (1 + ||A||_2)
};

Real default_gap_tol(const Matrix& a);
Real default_flat_tol(const Matrix& a);

SupportSample support_value(const Matrix& a, Real theta, Real gap_tol = -1.0);

/// Clusters the compressed imaginary part over `s.eigenbasis`; ascending slopes.
std::vector<SlopeGroup> slope_groups(const Matrix& a, const SupportSample& s, Real flat_tol);

/// e^{i theta}(mu + i s).
inline Complex support_point(Real theta, Real mu, Real slope) {
  return std::polar(1.0, theta) * Complex(mu, slope);
}

enum class SegmentKind { Arc, Flat, Corner };
const char* to_string(SegmentKind k);

struct BoundaryVertex {
  Real theta = 0.0;
  Real mu = 0.0;
  Complex z;
  int multiplicity = 1;
  SegmentKind kind = SegmentKind::Arc;
  int sample = -1;  // grid index, -1 for refined angles
};

struct FlatPortion {
  Real theta0 = 0.0;
  std::array<Complex, 2> endpoints;  // CCW order
  std::array<Real, 2> slopes{};      // (s_min, s_max)
  int multiplicity = 2;
  bool essential_like = false;
};

struct CornerPoint {
  Complex z;
  Real theta1 = 0.0;
  Real theta2 = 0.0;
};

/// Boundary point where the maximal eigenvalue is multiple with equal slopes
/// (tangential meeting of critical curves), or where the top eigenvector jumps.
struct SingularPoint {
  Complex z;
  Real theta = 0.0;
  int multiplicity = 1;
};

struct Arc {
  Real theta_begin = 0.0;
  Real theta_end = 0.0;  // may exceed 2 pi when the arc wraps
  int first_sample = 0;
  int last_sample = 0;
  int branch_id = -1;
};

struct BoundaryModel {
  Matrix a;
  int grid_size = 0;
  Real norm2 = 0.0;
  Real normf = 0.0;
  Real gap_tol = 0.0;
  Real flat_tol = 0.0;
  std::vector<SupportSample> samples;
  std::vector<std::vector<SlopeGroup>> slopes;  // per sample
  std::vector<BoundaryVertex> vertices;         // CCW, may repeat at corners
  std::vector<Arc> arcs;
  std::vector<FlatPortion> flats;
  std::vector<CornerPoint> corners;
  std::vector<SingularPoint> singular_points;
  bool degenerate = false;

  Real grid_step() const { return kTwoPi / grid_size; }
  /// Positional tolerance used for matching boundary points: 1e-8 (1 + ||A||_2).
  Real point_tol() const { return 1e-8 * (1.0 + norm2); }
  std::vector<Complex> polygon() const;  // distinct vertices, CCW
  Real diameter() const;
};

BoundaryModel boundary_scan(const Matrix& a, int grid_size, ScanTolerances tol = {});

struct ExtremePoint {
  Complex z;
  bool is_isolated = false;
  /// Supported by a single grid angle on a curved arc, i.e. one sample of a continuum.
  bool on_arc = false;
};

struct ExtremePointSet {
  std::vector<ExtremePoint> points;
  bool continuum = false;
};

Real default_iso_tol(const BoundaryModel& m);
ExtremePointSet extreme_points(const BoundaryModel& m, Real iso_tol);

enum class Membership { Inside, Boundary, Outside };
const char* to_string(Membership m);

/// min_theta (mu(theta) - Re(e^{-i theta} z)) with the minimizing angle, refined
/// between grid angles by golden-section search.
struct SupportGap {
  Real gap = 0.0;
  Real theta = 0.0;
};
SupportGap support_gap(const BoundaryModel& m, Complex z);

Membership hull_contains(const BoundaryModel& m, Complex z, Real margin);

/// Angle whose support line passes closest to z (maximizes Re(e^{-i theta}z) - mu).
Real supporting_angle(const BoundaryModel& m, Complex z);

/// Refines a support angle at a boundary z by bisecting the tangential
/// coordinate of p(theta) - z over theta0 +- 2 grid steps.
Real tangency_angle(const BoundaryModel& m, Complex z, Real theta0);

/// The boundary point reached at angle theta with the given slope choice.
Complex boundary_point(const Matrix& a, Real theta, bool leaving, Real gap_tol, Real flat_tol);

}  // namespace nrange
