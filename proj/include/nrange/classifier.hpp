#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nrange/critical_curves.hpp"
#include "nrange/gallery.hpp"
#include "nrange/support_geometry.hpp"

namespace nrange {

enum class Location { Interior, BoundaryArc, Corner, FlatInterior, FlatEndpoint };
enum class Case { I, II, III, NotApplicable };
enum class Verdict { Strong, WeakOnly, FailsWeak, Undecidable };

const char* to_string(Location l);
const char* to_string(Case c);
const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct Evidence {
  Real support_angle = 0.0;
  Real support_gap = 0.0;
  int multiplicity = 0;
  std::vector<Real> slopes;
  bool essential_like = false;
  bool normal = false;
  bool isolated = false;
  Real nearest_extreme = -1.0;  // distance to the nearest other extreme point, -1 if not an extreme point
  bool declared_limit = false;
  bool essential_meets_line = false;
  bool essential_contains = false;
  bool metadata_resolved = false;
  int curve_count = -1;          // distinct maximal curves through z, -1 if not computed
  int tracked_curve_count = -1;  // passages of the caller's branches, -1 if none given
  Real side_overlap = -1.0;      // top eigenspaces on either side of the support angle
  int preimage_rank = 0;
  std::string note;
};

struct ClassificationTolerances {
  Real margin = 0.0;
  Real iso_tol = 0.0;
  Real gap_tol = 0.0;
  Real flat_tol = 0.0;
  Real curve_tol = 0.0;
  Real metadata_tol = 0.0;
  Real normal_tol = 1e-10;
};

struct ClassificationReport {
  Complex z;
  Location location = Location::Interior;
  Case kase = Case::NotApplicable;
  Verdict verdict = Verdict::Undecidable;
  std::string rule;
  Evidence evidence;
  ClassificationTolerances tolerances;
};

struct ClassifyOptions {
  Real margin = -1.0;        // <= 0: 1e-6 (1 + ||A||_2)
  Real iso_tol = -1.0;       // <= 0: default_iso_tol
  Real curve_tol = -1.0;     // <= 0: 1e-6 (1 + ||A||_2)
  Real metadata_tol = 1e-2;  // matching of declared points, relative to 1 + ||A||_2
  int arc_samples = 16;
  Real window = 0.05;  // half-width of the local tracking interval
  int window_grid = 129;
  std::optional<GalleryMetadata> metadata;
};

ClassificationReport classify_point(const BoundaryModel& m, Complex z, const std::vector<CriticalBranch>& branches,
                                    const ClassifyOptions& opt = {});

struct BoundaryClassification {
  std::vector<ClassificationReport> reports;
  int non_strong = 0;   // weak_only + fails_weak
  int undecidable = 0;
  bool finite = false;  // the non-strong set is asserted finite (no essential flags, no declared W_e)
  std::vector<Complex> non_strong_points;
};

/// Corners, flat endpoints and midpoints, singular points, and arc samples.
BoundaryClassification classify_boundary(const BoundaryModel& m, const std::vector<CriticalBranch>& branches,
                                         const ClassifyOptions& opt = {});

}  // namespace nrange
