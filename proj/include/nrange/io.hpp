#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "nrange/classifier.hpp"
#include "nrange/critical_curves.hpp"
#include "nrange/gallery.hpp"
#include "nrange/inverse_map.hpp"
#include "nrange/prober.hpp"
#include "nrange/support_geometry.hpp"

namespace nrange::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// %.17g
std::string format_real(Real x);
/// Serializes with every floating value at 17 significant digits; keys keep insertion order.
std::string dump(const Json& j, int indent = 2);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Matrix format: {"dim": n, "entries": [[re, im], ...]} row-major.
Matrix parse_matrix(const std::string& text);
std::string matrix_json(const Matrix& a);
Matrix load_matrix(const std::string& path);

/// FNV-1a 64 of matrix_json(a), 16 lowercase hex digits.
std::string operator_hash(const Matrix& a);

/// Sidecar keyed by the operator hash.
Json metadata_json(const GalleryMetadata& meta, const Matrix& a, const std::string& name);
/// Throws InvalidInput if the sidecar's hash does not match a.
GalleryMetadata parse_metadata(const std::string& text, const Matrix& a);

struct BoundaryRow {
  Real theta = 0.0;
  Real mu = 0.0;
  Complex z;
  int multiplicity = 1;
  std::string kind;
};

struct CurveRow {
  int branch_id = 0;
  Real theta = 0.0;
  Real lambda = 0.0;
  Real lambda_prime = 0.0;
  Complex point;
  bool is_maximal = false;
};

std::vector<BoundaryRow> boundary_rows(const BoundaryModel& m);
std::vector<CurveRow> curve_rows(const BranchTracking& t);
std::string boundary_csv(const std::vector<BoundaryRow>& rows);
std::string curves_csv(const std::vector<CurveRow>& rows);
std::vector<BoundaryRow> parse_boundary_csv(const std::string& text);
std::vector<CurveRow> parse_curves_csv(const std::string& text);

Json to_json(Complex z);
Json to_json(const UnitVector& x);
Json to_json(const BoundaryModel& m);
Json to_json(const BranchTracking& t);
Json to_json(const ClassificationReport& r);
Json to_json(const BoundaryClassification& c);
Json to_json(const PreimageResult& r);
Json to_json(const ProbeReport& r);

struct RunManifest {
  std::string command;
  std::string input_hash;
  Json parameters = Json::object();  // tolerances, seeds, grid sizes in force
  std::string version = kToolVersion;

  Json to_json() const;
};

/// Boundary polyline, flats, singular points (rows with multiplicity > 1 off a flat) and curves.
/// viewBox covers everything with a 5% margin; y is flipped so Im z points up.
std::string render_svg(const std::vector<BoundaryRow>& boundary, const std::vector<CurveRow>& curves);

}  // namespace nrange::io
