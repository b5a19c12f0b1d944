#pragma once

#include <cstdint>
#include <vector>

#include "nrange/support_geometry.hpp"

namespace nrange {

enum class Construction { BoundaryEigenvector, TwoByTwoReduction };
const char* to_string(Construction c);

struct PreimageResult {
  Complex z_target;
  UnitVector x;
  Complex achieved;  // f_A(x)
  Real residual = 0.0;
  Construction construction = Construction::BoundaryEigenvector;
  int span_projector_rank = 1;
};

/// Eigenvectors of the top eigenspace at theta, one per slope group direction
/// (so the f-values are the flat endpoints when the space is split). With
/// sweep > 0 and multiplicity > 1, adds cos s v1 + e^{i phi} sin s v2 for
/// s = k pi/(2 sweep), phi = 0.
std::vector<PreimageResult> boundary_preimages(const Matrix& a, Real theta, Real gap_tol = -1.0, int sweep = 0);

/// Unit u in C^2 with |u* b u - z| <= tol. Throws NotInRange if z is outside
/// the ellipse W(b) by more than tol. The solutions form a path from one side of
/// the Schur basis to the other; last_root picks the far end.
UnitVector solve_2x2(const Matrix& b, Complex z, Real tol, bool last_root = false);

struct PreimageOptions {
  int grid_size = 256;
  std::uint64_t seed = 0x5eed;
  int max_chords = 64;
  Real chord_offset = 0.0;  // first chord: tangent of the nearest support line, rotated by this
  bool last_root = false;
};

/// One unit x with |f_A(x) - z| <= tol.
PreimageResult preimage(const Matrix& a, Complex z, Real tol, PreimageOptions opt = {});
PreimageResult preimage(const BoundaryModel& m, Complex z, Real tol, PreimageOptions opt = {});

/// Orthogonal projector onto span of the vectors, and its rank (singular values > tol).
Matrix span_projector(const std::vector<UnitVector>& xs, Real tol = 1e-8);
int span_rank(const std::vector<UnitVector>& xs, Real tol = 1e-8);

}  // namespace nrange
