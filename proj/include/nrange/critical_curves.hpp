#pragma once

#include <vector>

#include "nrange/support_geometry.hpp"

namespace nrange {

/// First-order slopes of the maximal eigenvalue at theta0: eigenvalues of
/// Im(e^{-i theta0}A) compressed to the near-maximal eigenspace, ascending.
std::vector<SlopeGroup> branch_slopes(const Matrix& a, Real theta0, Real gap_tol = -1.0);

struct CriticalBranch {
  int id = 0;
  int grid_offset = 0;  // index of theta.front() in the tracking grid
  std::vector<Real> theta;
  std::vector<Real> lambda;
  std::vector<Real> lambda_prime;
  std::vector<UnitVector> vectors;
  std::vector<bool> is_maximal;

  std::size_t size() const { return theta.size(); }
};

/// A branch whose best continuation overlap fell below the threshold.
struct CrossingEvent {
  Real theta = 0.0;  // first grid angle where the branch could not be continued
  int branch_id = 0;
  Real overlap = 0.0;
};

struct TrackOptions {
  Real gap_tol = -1.0;
  Real flat_tol = -1.0;
  Real overlap_threshold = 0.9;
  bool strict = false;   // throw BranchLost instead of recording a crossing
  bool restart = true;   // start a fresh branch after a termination
};

struct BranchTracking {
  std::vector<CriticalBranch> branches;
  std::vector<CrossingEvent> crossings;
  std::vector<Real> grid;
};

/// Tracks the top_k eigenvalue branches of Re(e^{-i theta}A) over
/// theta_j = a + j (b - a)/(grid_size - 1) by eigenvector overlap.
BranchTracking track_branches(const Matrix& a, Real theta_a, Real theta_b, int grid_size, int top_k,
                              TrackOptions opt = {});

/// e^{i theta}(lambda + i lambda') along the branch.
std::vector<Complex> curve_points(const CriticalBranch& b);

struct CurvesThrough {
  int count = 0;
  std::vector<int> branch_ids;  // one entry per passage
  std::vector<Real> thetas;     // angle of closest approach per passage
};

/// Passages of branch curves within tol of z. A passage is a run of grid hits;
/// runs separated by more than 10 grid steps are distinct. With maximal_only,
/// only points where the branch is maximal (i.e. on the boundary) count.
CurvesThrough curves_through(const std::vector<CriticalBranch>& branches, Complex z, Real tol,
                             bool maximal_only = true);

/// Labels each arc of the model with the branch that is maximal along it.
void tag_arcs(BoundaryModel& model, const std::vector<CriticalBranch>& branches);

}  // namespace nrange
