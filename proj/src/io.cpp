#include "nrange/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace nrange::io {

std::string format_real(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void emit(const Json& j, int indent, int level, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float: {
      const Real v = j.get<Real>();
      out += std::isfinite(v) ? format_real(v) : "null";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays (points, pairs) stay on one line.
      const bool flat = j.size() <= 2 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        if (flat) {
          if (out.back() == ',') out += ' ';
        } else {
          out += nl;
          out += pad;
        }
        emit(e, indent, level + 1, out);
      }
      if (!flat) out += nl + close_pad;
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += nl;
        out += pad;
        out += Json(k).dump();
        out += indent > 0 ? ": " : ":";
        emit(v, indent, level + 1, out);
      }
      out += nl + close_pad;
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string(what) + ": " + e.what());
  }
}

Real finite_number(const Json& j, const char* what) {
  if (!j.is_number()) throw InvalidInput(std::string(what) + ": expected a number");
  const Real v = j.get<Real>();
  if (!std::isfinite(v)) throw InvalidInput(std::string(what) + ": non-finite value");
  return v;
}

Complex complex_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw InvalidInput(std::string(what) + ": expected [re, im]");
  return {finite_number(j[0], what), finite_number(j[1], what)};
}

std::vector<Complex> complex_list(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string(what) + ": expected an array");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_from(e, what));
  return out;
}

Json complex_list_json(const std::vector<Complex>& zs) {
  Json a = Json::array();
  for (Complex z : zs) a.push_back(to_json(z));
  return a;
}

std::string string_or(const Json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw InvalidInput(std::string(key) + ": expected a string");
  return j[key].get<std::string>();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> csv_records(const std::string& text, const std::string& header) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) throw InvalidInput("unexpected CSV header: " + line);
      seen_header = true;
      continue;
    }
    out.push_back(split(line, ','));
  }
  if (!seen_header) throw InvalidInput("empty CSV");
  return out;
}

Real real_field(const std::string& s) {
  Real v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) throw InvalidInput("bad CSV number: " + s);
  return v;
}

int int_field(const std::string& s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw InvalidInput("bad CSV integer: " + s);
  return v;
}

constexpr const char* kBoundaryHeader = "theta,mu,re_z,im_z,multiplicity,segment_kind";
constexpr const char* kCurvesHeader = "branch_id,theta,lambda,lambda_prime,re_point,im_point,is_maximal";

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  out += '\n';
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << content;
  if (!out) throw InvalidInput("write failed: " + path);
}

Matrix parse_matrix(const std::string& text) {
  const Json j = parse_json(text, "matrix JSON");
  if (!j.is_object()) throw InvalidInput("matrix JSON: expected an object");
  for (const auto& [k, v] : j.items())
    if (k != "dim" && k != "entries") throw InvalidInput("matrix JSON: unknown key " + k);
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw InvalidInput("matrix JSON: dim must be an integer");
  const auto n = j["dim"].get<std::int64_t>();
  if (n < 1 || n > 4096) throw InvalidInput("matrix JSON: dim out of range");
  if (!j.contains("entries") || !j["entries"].is_array()) throw InvalidInput("matrix JSON: entries must be an array");
  const Json& e = j["entries"];
  if (static_cast<std::int64_t>(e.size()) != n * n) throw InvalidInput("matrix JSON: expected dim^2 entries");
  Matrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) a(r, c) = complex_from(e[static_cast<std::size_t>(r * n + c)], "matrix entry");
  return a;
}

std::string matrix_json(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("matrix must be square");
  std::string out = "{\"dim\": " + std::to_string(a.rows()) + ", \"entries\": [";
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (r || c) out += ", ";
      out += '[' + format_real(a(r, c).real()) + ", " + format_real(a(r, c).imag()) + ']';
    }
  out += "]}\n";
  return out;
}

Matrix load_matrix(const std::string& path) { return parse_matrix(read_file(path)); }

std::string operator_hash(const Matrix& a) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : matrix_json(a)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json metadata_json(const GalleryMetadata& meta, const Matrix& a, const std::string& name) {
  Json j;
  j["operator_hash"] = operator_hash(a);
  j["name"] = name;
  if (meta.essential_range) {
    const EssentialRange& e = *meta.essential_range;
    Json er;
    er["points"] = complex_list_json(e.points);
    er["disk_center"] = e.disk_center ? to_json(*e.disk_center) : Json(nullptr);
    er["disk_radius"] = e.disk_radius;
    er["description"] = e.description;
    j["essential_range"] = er;
  } else {
    j["essential_range"] = nullptr;
  }
  j["declared_limit_extreme_points"] = complex_list_json(meta.declared_limit_extreme_points);
  Json rp = Json::array();
  for (const auto& p : meta.resolved_points) rp.push_back({{"z", to_json(p.z)}, {"verdict", p.verdict}, {"reason", p.reason}});
  j["resolved_points"] = rp;
  j["expected_singular_points"] = complex_list_json(meta.expected_singular_points);
  j["support_oracle"] = meta.support_oracle;
  j["branch_oracle"] = meta.branch_oracle;
  j["notes"] = meta.notes;
  return j;
}

GalleryMetadata parse_metadata(const std::string& text, const Matrix& a) {
  const Json j = parse_json(text, "metadata JSON");
  if (!j.is_object()) throw InvalidInput("metadata JSON: expected an object");
  const std::string hash = string_or(j, "operator_hash", "");
  if (hash != operator_hash(a)) throw InvalidInput("metadata sidecar belongs to another operator (hash " + hash + ")");
  GalleryMetadata m;
  if (j.contains("essential_range") && !j["essential_range"].is_null()) {
    const Json& e = j["essential_range"];
    if (!e.is_object()) throw InvalidInput("essential_range: expected an object");
    EssentialRange er;
    if (e.contains("points")) er.points = complex_list(e["points"], "essential_range.points");
    if (e.contains("disk_center") && !e["disk_center"].is_null())
      er.disk_center = complex_from(e["disk_center"], "essential_range.disk_center");
    if (e.contains("disk_radius")) er.disk_radius = finite_number(e["disk_radius"], "essential_range.disk_radius");
    er.description = string_or(e, "description", "");
    m.essential_range = er;
  }
  if (j.contains("declared_limit_extreme_points"))
    m.declared_limit_extreme_points = complex_list(j["declared_limit_extreme_points"], "declared_limit_extreme_points");
  if (j.contains("resolved_points")) {
    if (!j["resolved_points"].is_array()) throw InvalidInput("resolved_points: expected an array");
    for (const auto& p : j["resolved_points"]) {
      if (!p.is_object() || !p.contains("z")) throw InvalidInput("resolved_points: expected {z, verdict, reason}");
      ResolvedPoint r{complex_from(p["z"], "resolved_points.z"), string_or(p, "verdict", ""), string_or(p, "reason", "")};
      verdict_from_string(r.verdict);  // validates
      m.resolved_points.push_back(r);
    }
  }
  if (j.contains("expected_singular_points"))
    m.expected_singular_points = complex_list(j["expected_singular_points"], "expected_singular_points");
  m.support_oracle = string_or(j, "support_oracle", "");
  m.branch_oracle = string_or(j, "branch_oracle", "");
  m.notes = string_or(j, "notes", "");
  return m;
}

std::vector<BoundaryRow> boundary_rows(const BoundaryModel& m) {
  std::vector<BoundaryRow> rows;
  rows.reserve(m.vertices.size());
  for (const auto& v : m.vertices) rows.push_back({v.theta, v.mu, v.z, v.multiplicity, to_string(v.kind)});
  return rows;
}

std::vector<CurveRow> curve_rows(const BranchTracking& t) {
  std::vector<CurveRow> rows;
  for (const auto& b : t.branches) {
    const auto pts = curve_points(b);
    for (std::size_t i = 0; i < b.size(); ++i)
      rows.push_back({b.id, b.theta[i], b.lambda[i], b.lambda_prime[i], pts[i], static_cast<bool>(b.is_maximal[i])});
  }
  return rows;
}

std::string boundary_csv(const std::vector<BoundaryRow>& rows) {
  std::string out = std::string(kBoundaryHeader) + "\n";
  for (const auto& r : rows)
    out += format_real(r.theta) + ',' + format_real(r.mu) + ',' + format_real(r.z.real()) + ',' + format_real(r.z.imag()) +
           ',' + std::to_string(r.multiplicity) + ',' + r.kind + '\n';
  return out;
}

std::string curves_csv(const std::vector<CurveRow>& rows) {
  std::string out = std::string(kCurvesHeader) + "\n";
  for (const auto& r : rows)
    out += std::to_string(r.branch_id) + ',' + format_real(r.theta) + ',' + format_real(r.lambda) + ',' +
           format_real(r.lambda_prime) + ',' + format_real(r.point.real()) + ',' + format_real(r.point.imag()) + ',' +
           (r.is_maximal ? "1" : "0") + '\n';
  return out;
}

std::vector<BoundaryRow> parse_boundary_csv(const std::string& text) {
  std::vector<BoundaryRow> rows;
  for (const auto& f : csv_records(text, kBoundaryHeader)) {
    if (f.size() != 6) throw InvalidInput("boundary CSV: expected 6 fields");
    if (f[5] != "arc" && f[5] != "flat" && f[5] != "corner") throw InvalidInput("boundary CSV: bad segment kind " + f[5]);
    rows.push_back({real_field(f[0]), real_field(f[1]), {real_field(f[2]), real_field(f[3])}, int_field(f[4]), f[5]});
  }
  return rows;
}

std::vector<CurveRow> parse_curves_csv(const std::string& text) {
  std::vector<CurveRow> rows;
  for (const auto& f : csv_records(text, kCurvesHeader)) {
    if (f.size() != 7) throw InvalidInput("curves CSV: expected 7 fields");
    if (f[6] != "0" && f[6] != "1") throw InvalidInput("curves CSV: is_maximal must be 0 or 1");
    rows.push_back({int_field(f[0]), real_field(f[1]), real_field(f[2]), real_field(f[3]),
                    {real_field(f[4]), real_field(f[5])}, f[6] == "1"});
  }
  return rows;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const UnitVector& x) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < x.dim(); ++k) a.push_back(to_json(x.components(k)));
  return a;
}

Json to_json(const BoundaryModel& m) {
  Json j;
  j["dim"] = m.a.rows();
  j["grid_size"] = m.grid_size;
  j["norm2"] = m.norm2;
  j["gap_tol"] = m.gap_tol;
  j["flat_tol"] = m.flat_tol;
  j["degenerate"] = m.degenerate;
  j["vertex_count"] = m.vertices.size();
  Json flats = Json::array();
  for (const auto& f : m.flats)
    flats.push_back({{"theta0", f.theta0},
                     {"endpoints", Json::array({to_json(f.endpoints[0]), to_json(f.endpoints[1])})},
                     {"slopes", Json::array({f.slopes[0], f.slopes[1]})},
                     {"multiplicity", f.multiplicity},
                     {"essential_like", f.essential_like}});
  j["flats"] = flats;
  Json corners = Json::array();
  for (const auto& c : m.corners) corners.push_back({{"z", to_json(c.z)}, {"theta1", c.theta1}, {"theta2", c.theta2}});
  j["corners"] = corners;
  Json sing = Json::array();
  for (const auto& s : m.singular_points)
    sing.push_back({{"z", to_json(s.z)}, {"theta", s.theta}, {"multiplicity", s.multiplicity}});
  j["singular_points"] = sing;
  Json arcs = Json::array();
  for (const auto& a : m.arcs)
    arcs.push_back({{"theta_begin", a.theta_begin}, {"theta_end", a.theta_end}, {"branch_id", a.branch_id}});
  j["arcs"] = arcs;
  return j;
}

Json to_json(const BranchTracking& t) {
  Json j;
  j["grid_size"] = t.grid.size();
  Json br = Json::array();
  for (const auto& b : t.branches) {
    const auto maximal = std::count(b.is_maximal.begin(), b.is_maximal.end(), true);
    br.push_back({{"id", b.id},
                  {"samples", b.size()},
                  {"theta_begin", b.theta.empty() ? 0.0 : b.theta.front()},
                  {"theta_end", b.theta.empty() ? 0.0 : b.theta.back()},
                  {"maximal_samples", maximal}});
  }
  j["branches"] = br;
  Json cr = Json::array();
  for (const auto& c : t.crossings) cr.push_back({{"theta", c.theta}, {"branch_id", c.branch_id}, {"overlap", c.overlap}});
  j["crossings"] = cr;
  return j;
}

Json to_json(const ClassificationReport& r) {
  const Evidence& e = r.evidence;
  Json ev;
  ev["support_angle"] = e.support_angle;
  ev["support_gap"] = e.support_gap;
  ev["multiplicity"] = e.multiplicity;
  ev["slopes"] = e.slopes;
  ev["essential_like"] = e.essential_like;
  ev["normal"] = e.normal;
  ev["isolated"] = e.isolated;
  ev["nearest_extreme"] = e.nearest_extreme;
  ev["declared_limit"] = e.declared_limit;
  ev["essential_meets_line"] = e.essential_meets_line;
  ev["essential_contains"] = e.essential_contains;
  ev["metadata_resolved"] = e.metadata_resolved;
  ev["curve_count"] = e.curve_count;
  ev["tracked_curve_count"] = e.tracked_curve_count;
  ev["side_overlap"] = e.side_overlap;
  ev["preimage_rank"] = e.preimage_rank;
  ev["note"] = e.note;
  const ClassificationTolerances& t = r.tolerances;
  Json tol = {{"margin", t.margin},     {"iso_tol", t.iso_tol},           {"gap_tol", t.gap_tol},
              {"flat_tol", t.flat_tol}, {"curve_tol", t.curve_tol},       {"metadata_tol", t.metadata_tol},
              {"normal_tol", t.normal_tol}};
  Json j;
  j["z"] = to_json(r.z);
  j["location"] = to_string(r.location);
  j["case"] = to_string(r.kase);
  j["verdict"] = to_string(r.verdict);
  j["rule"] = r.rule;
  j["evidence"] = ev;
  j["tolerances"] = tol;
  return j;
}

Json to_json(const BoundaryClassification& c) {
  Json j;
  j["non_strong"] = c.non_strong;
  j["undecidable"] = c.undecidable;
  j["finite"] = c.finite;
  j["non_strong_points"] = complex_list_json(c.non_strong_points);
  Json reps = Json::array();
  for (const auto& r : c.reports) reps.push_back(to_json(r));
  j["reports"] = reps;
  return j;
}

Json to_json(const PreimageResult& r) {
  Json j;
  j["z_target"] = to_json(r.z_target);
  j["x"] = to_json(r.x);
  j["achieved"] = to_json(r.achieved);
  j["residual"] = r.residual;
  j["construction"] = to_string(r.construction);
  j["span_projector_rank"] = r.span_projector_rank;
  return j;
}

Json to_json(const ProbeReport& r) {
  Json j;
  j["z"] = to_json(r.z);
  j["r0"] = r.r0;
  j["margin"] = r.margin;
  j["verdict"] = to_string(r.verdict);
  j["weak_verdict"] = to_string(r.weak_verdict);
  Json pre = Json::array();
  for (const auto& p : r.preimages) {
    Json recs = Json::array();
    for (const auto& e : p.records)
      recs.push_back({{"eps", e.eps},
                      {"convexity_defect", e.convexity_defect},
                      {"delta_max_covered", e.delta_max_covered},
                      {"relative_nbhd_covered", e.relative_nbhd_covered},
                      {"deficit", e.deficit},
                      {"noise", e.noise}});
    pre.push_back({{"construction", p.construction}, {"verdict", to_string(p.verdict)}, {"x", to_json(p.x)}, {"records", recs}});
  }
  j["preimages"] = pre;
  return j;
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["input_hash"] = input_hash;
  j["parameters"] = parameters;
  j["version"] = version;
  return j;
}

std::string render_svg(const std::vector<BoundaryRow>& boundary, const std::vector<CurveRow>& curves) {
  Real x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool any = false;
  auto grow = [&](Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
    if (!any) {
      x0 = x1 = z.real();
      y0 = y1 = z.imag();
      any = true;
      return;
    }
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  };
  for (const auto& r : boundary) grow(r.z);
  for (const auto& r : curves) grow(r.point);
  Real w = x1 - x0, h = y1 - y0;
  if (w <= 0) w = std::max(h, 1.0);
  if (h <= 0) h = std::max(w, 1.0);
  const Real mx = 0.05 * w, my = 0.05 * h;
  auto num = [](Real v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  auto pt = [&](Complex z) { return num(z.real()) + ',' + num(-z.imag()); };

  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" + num(800.0 * (h + 2 * my) / (w + 2 * mx)) +
       "\" viewBox=\"" + num(x0 - mx) + ' ' + num(-y1 - my) + ' ' + num(w + 2 * mx) + ' ' + num(h + 2 * my) + "\">\n";
  const std::string stroke = "fill=\"none\" vector-effect=\"non-scaling-stroke\"";
  if (!boundary.empty()) {
    s += "<polygon class=\"boundary\" " + stroke + " stroke=\"#000000\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < boundary.size(); ++i) s += (i ? " " : "") + pt(boundary[i].z);
    s += "\"/>\n";
    for (std::size_t i = 0; i + 1 < boundary.size(); ++i)
      if (boundary[i].kind == "flat" && boundary[i + 1].kind == "flat" && boundary[i].theta == boundary[i + 1].theta) {
        s += "<line class=\"flat\" " + stroke + " stroke=\"#d62728\" stroke-width=\"4\" x1=\"" + num(boundary[i].z.real()) +
             "\" y1=\"" + num(-boundary[i].z.imag()) + "\" x2=\"" + num(boundary[i + 1].z.real()) + "\" y2=\"" +
             num(-boundary[i + 1].z.imag()) + "\"/>\n";
        ++i;
      }
    const Real rad = 0.006 * std::max(w, h);
    for (const auto& r : boundary)
      if (r.kind == "arc" && r.multiplicity > 1)
        s += "<circle class=\"singular\" cx=\"" + num(r.z.real()) + "\" cy=\"" + num(-r.z.imag()) + "\" r=\"" + num(rad) +
             "\" fill=\"#1f77b4\"/>\n";
  }
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  std::map<int, std::vector<Complex>> by_branch;
  for (const auto& r : curves) by_branch[r.branch_id].push_back(r.point);
  int k = 0;
  for (const auto& [id, pts] : by_branch) {
    s += "<polyline class=\"curve\" data-branch=\"" + std::to_string(id) + "\" " + stroke + " stroke=\"" + palette[k++ % 8] +
         "\" stroke-width=\"1\" points=\"";
    bool first = true;
    for (Complex z : pts) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
      s += (first ? "" : " ") + pt(z);
      first = false;
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace nrange::io
