#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "nrange/io.hpp"

namespace nrange::cli {

namespace {

using io::Json;

constexpr const char* kLimitation =
    "finite sections only: limit points of extreme points and essential ranges of infinite-dimensional operators "
    "are not computed; they enter only through declared metadata";

Real parse_real(const std::string& s, const std::string& what) {
  Real v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) throw InvalidInput("bad " + what + ": " + s);
  return v;
}

Complex parse_z(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InvalidInput("expected re,im but got " + s);
  return {parse_real(s.substr(0, comma), "real part"), parse_real(s.substr(comma + 1), "imaginary part")};
}

std::uint64_t default_seed() {
  const char* env = std::getenv("NRANGE_SEED");
  if (!env || !*env) return 0x5eed;
  const std::string s(env);
  std::uint64_t v = 0;
  const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
  const char* b = s.data() + (hex ? 2 : 0);
  const auto [p, ec] = std::from_chars(b, s.data() + s.size(), v, hex ? 16 : 10);
  if (ec != std::errc() || p != s.data() + s.size()) throw InvalidInput("NRANGE_SEED is not an unsigned integer: " + s);
  return v;
}

std::string fmt(Real x) {
  std::ostringstream ss;
  ss << std::setprecision(6) << x + 0.0;  // no -0
  return ss.str();
}

std::string fmt(Complex z) { return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i"; }

Json wrap(const io::RunManifest& m, const char* key, Json body, bool limitation = false) {
  Json j;
  j["manifest"] = m.to_json();
  if (limitation) j["limitation"] = kLimitation;
  j[key] = std::move(body);
  return j;
}

void check_grid(int grid) {
  if (grid < 64) throw InvalidInput("grid must be >= 64");
}

Json error_json(const std::exception& e, int code) {
  Json j;
  if (const auto* n = dynamic_cast<const Error*>(&e)) {
    j["error"] = n->kind();
    if (const auto* c = dynamic_cast<const NoConvergence*>(&e)) j["best_residual"] = c->best_residual;
    if (const auto* b = dynamic_cast<const BranchLost*>(&e)) {
      j["theta"] = b->theta;
      j["overlap"] = b->overlap;
    }
    if (const auto* c = dynamic_cast<const ChordSearchFailed*>(&e)) j["attempts"] = c->attempts;
  } else if (dynamic_cast<const CLI::ParseError*>(&e)) {
    j["error"] = "UsageError";
  } else {
    j["error"] = "InternalError";
  }
  j["message"] = e.what();
  j["exit_code"] = code;
  return j;
}

}  // namespace

int exit_code(const std::exception& e) {
  if (const auto* n = dynamic_cast<const Error*>(&e)) return n->is_input_error() ? 2 : 3;
  if (dynamic_cast<const CLI::ParseError*>(&e)) return 2;
  return 3;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical range geometry and inverse continuity of the numerical range map"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "machine-readable JSON on stdout");

  std::string matrix_path, out_path, z_text, meta_path;
  int grid = 0;

  // boundary
  auto* boundary = app.add_subcommand("boundary", "scan the boundary of W(A) to CSV");
  boundary->add_option("matrix", matrix_path, "matrix JSON")->required();
  boundary->add_option("--grid", grid, "theta grid size")->default_val(1024);
  boundary->add_option("-o,--output", out_path, "CSV path (stdout if omitted)");

  // curves
  auto* curves = app.add_subcommand("curves", "track critical curves to CSV");
  std::vector<Real> range{0.0, kTwoPi};
  int top = 3;
  curves->add_option("matrix", matrix_path, "matrix JSON")->required();
  curves->add_option("--range", range, "theta range a b")->expected(2);
  curves->add_option("--top", top, "number of branches")->default_val(3);
  curves->add_option("--grid", grid, "grid points over the range")->default_val(513);
  curves->add_option("-o,--output", out_path, "CSV path (stdout if omitted)");

  // classify
  auto* classify = app.add_subcommand("classify", "classify boundary points by inverse continuity");
  int arc_samples = 16;
  int track_top = 0;
  classify->add_option("matrix", matrix_path, "matrix JSON")->required();
  classify->add_option("--metadata", meta_path, "metadata sidecar JSON");
  classify->add_option("--z", z_text, "single point re,im (whole boundary if omitted)");
  classify->add_option("--grid", grid, "theta grid size")->default_val(512);
  classify->add_option("--arc-samples", arc_samples, "sampled points per boundary arc")->default_val(16);
  classify->add_option("--top", track_top, "branches tracked for curve counts (default min(n, 4))");
  classify->add_option("-o,--output", out_path, "report JSON path");

  // invert
  auto* invert = app.add_subcommand("invert", "construct a unit x with f_A(x) = z");
  Real tol = 1e-10;
  std::uint64_t seed = 0;
  invert->add_option("matrix", matrix_path, "matrix JSON")->required();
  invert->add_option("--z", z_text, "target re,im")->required();
  invert->add_option("--tol", tol, "residual tolerance")->default_val(1e-10);
  invert->add_option("--grid", grid, "theta grid size")->default_val(256);
  invert->add_option("--seed", seed, "chord seed (NRANGE_SEED if omitted)");
  invert->add_option("-o,--output", out_path, "JSON path");

  // probe
  auto* probe = app.add_subcommand("probe", "Monte Carlo openness probe at z");
  std::vector<Real> eps;
  int samples = 20000;
  std::string cloud_path;
  probe->add_option("matrix", matrix_path, "matrix JSON")->required();
  probe->add_option("--z", z_text, "target re,im")->required();
  probe->add_option("--eps", eps, "decreasing cap radii");
  probe->add_option("--seed", seed, "sampling seed (NRANGE_SEED if omitted)");
  probe->add_option("--samples", samples, "samples per eps")->default_val(20000);
  probe->add_option("--grid", grid, "theta grid size")->default_val(256);
  probe->add_option("--cloud", cloud_path, "CSV of the sampled cap images");
  probe->add_option("-o,--output", out_path, "JSON path");

  // gallery
  auto* gallery = app.add_subcommand("gallery", "reference operators");
  gallery->require_subcommand(1);
  auto* glist = gallery->add_subcommand("list", "list operators");
  auto* gbuild = gallery->add_subcommand("build", "write matrix JSON and metadata sidecar");
  std::string gname;
  std::vector<std::string> gparams;
  gbuild->add_option("name", gname, "operator name")->required();
  gbuild->add_option("--param", gparams, "key=value");
  gbuild->add_option("-o,--output", out_path, "matrix JSON path")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "render boundary and curves to SVG");
  std::string boundary_csv_path, curves_csv_path;
  plot->add_option("boundary", boundary_csv_path, "boundary CSV")->required();
  plot->add_option("curves", curves_csv_path, "curves CSV");
  plot->add_option("-o,--output", out_path, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << io::dump(error_json(e, 2), 0);
    return 2;
  }

  try {
    const bool seed_given = (invert->parsed() && invert->count("--seed")) || (probe->parsed() && probe->count("--seed"));
    if (!seed_given) seed = default_seed();

    if (boundary->parsed()) {
      check_grid(grid);
      const Matrix a = io::load_matrix(matrix_path);
      const BoundaryModel m = boundary_scan(a, grid);
      io::RunManifest man{"boundary", io::operator_hash(a)};
      man.parameters = {{"grid", grid}, {"gap_tol", m.gap_tol}, {"flat_tol", m.flat_tol}};
      const std::string csv = io::boundary_csv(io::boundary_rows(m));
      if (!out_path.empty()) {
        io::write_file(out_path, csv);
        io::write_file(out_path + ".manifest.json", io::dump(man.to_json()));
      }
      if (json) {
        out << io::dump(wrap(man, "boundary", io::to_json(m)));
      } else if (out_path.empty()) {
        out << csv;
      } else {
        out << m.vertices.size() << " boundary vertices, " << m.flats.size() << " flats, " << m.corners.size()
            << " corners, " << m.singular_points.size() << " singular points -> " << out_path << '\n';
      }
      return 0;
    }

    if (curves->parsed()) {
      check_grid(grid);
      if (top < 1) throw InvalidInput("--top must be >= 1");
      if (!(range[1] > range[0])) throw InvalidInput("--range needs a < b");
      const Matrix a = io::load_matrix(matrix_path);
      const BranchTracking t = track_branches(a, range[0], range[1], grid, top);
      io::RunManifest man{"curves", io::operator_hash(a)};
      const TrackOptions topt;
      man.parameters = {{"range", Json::array({range[0], range[1]})},
                        {"grid", grid},
                        {"top", top},
                        {"overlap_threshold", topt.overlap_threshold}};
      const std::string csv = io::curves_csv(io::curve_rows(t));
      if (!out_path.empty()) {
        io::write_file(out_path, csv);
        io::write_file(out_path + ".manifest.json", io::dump(man.to_json()));
      }
      if (json) {
        out << io::dump(wrap(man, "curves", io::to_json(t)));
      } else if (out_path.empty()) {
        out << csv;
      } else {
        out << t.branches.size() << " branches, " << t.crossings.size() << " crossings -> " << out_path << '\n';
      }
      return 0;
    }

    if (classify->parsed()) {
      check_grid(grid);
      const Matrix a = io::load_matrix(matrix_path);
      ClassifyOptions opt;
      opt.arc_samples = arc_samples;
      io::RunManifest man{"classify", io::operator_hash(a)};
      if (!meta_path.empty()) opt.metadata = io::parse_metadata(io::read_file(meta_path), a);
      const int k = track_top > 0 ? track_top : static_cast<int>(std::min<Eigen::Index>(a.rows(), 4));
      const BoundaryModel m = boundary_scan(a, grid);
      const BranchTracking t = track_branches(a, 0.0, kTwoPi, grid + 1, k);
      Json body;
      std::ostringstream human;
      ClassificationTolerances used;
      if (!z_text.empty()) {
        const ClassificationReport r = classify_point(m, parse_z(z_text), t.branches, opt);
        used = r.tolerances;
        body = io::to_json(r);
        human << to_string(r.verdict) << "  " << to_string(r.location) << "  case " << to_string(r.kase) << "  "
              << r.rule << "  at " << fmt(r.z) << '\n';
      } else {
        const BoundaryClassification c = classify_boundary(m, t.branches, opt);
        if (!c.reports.empty()) used = c.reports.front().tolerances;
        body = io::to_json(c);
        human << c.reports.size() << " points, " << c.non_strong << " non-strong, " << c.undecidable << " undecidable"
              << (c.finite ? "" : " (non-strong set not asserted finite)") << '\n';
        for (const auto& r : c.reports)
          if (r.verdict != Verdict::Strong)
            human << "  " << to_string(r.verdict) << "  " << to_string(r.location) << "  case " << to_string(r.kase)
                  << "  " << r.rule << "  at " << fmt(r.z) << '\n';
      }
      man.parameters = {{"grid", grid},
                        {"track_top", k},
                        {"arc_samples", arc_samples},
                        {"metadata", opt.metadata ? io::operator_hash(a) : ""},
                        {"margin", used.margin},
                        {"iso_tol", used.iso_tol},
                        {"gap_tol", used.gap_tol},
                        {"flat_tol", used.flat_tol},
                        {"curve_tol", used.curve_tol},
                        {"metadata_tol", used.metadata_tol}};
      const std::string text = io::dump(wrap(man, "classification", body, true));
      if (!out_path.empty()) io::write_file(out_path, text);
      out << (json ? text : human.str());
      return 0;
    }

    if (invert->parsed()) {
      check_grid(grid);
      if (!(tol > 0)) throw InvalidInput("--tol must be positive");
      const Matrix a = io::load_matrix(matrix_path);
      PreimageOptions po;
      po.grid_size = grid;
      po.seed = seed;
      const PreimageResult r = preimage(a, parse_z(z_text), tol, po);
      io::RunManifest man{"invert", io::operator_hash(a)};
      man.parameters = {{"tol", tol}, {"grid", grid}, {"seed", seed}, {"max_chords", po.max_chords}};
      const std::string text = io::dump(wrap(man, "preimage", io::to_json(r)));
      if (!out_path.empty()) io::write_file(out_path, text);
      if (json) {
        out << text;
      } else {
        out << "f_A(x) = " << fmt(r.achieved) << "  residual " << fmt(r.residual) << "  via " << to_string(r.construction)
            << '\n';
        for (Eigen::Index i = 0; i < r.x.dim(); ++i) out << "  x[" << i << "] = " << fmt(r.x.components(i)) << '\n';
      }
      return 0;
    }

    if (probe->parsed()) {
      check_grid(grid);
      const Matrix a = io::load_matrix(matrix_path);
      ProbeConfig cfg;
      if (!eps.empty()) cfg.eps_list = eps;
      cfg.samples_per_eps = samples;
      cfg.seed = seed;
      cfg.validate();
      const BoundaryModel m = boundary_scan(a, grid);
      const ProbeReport r = openness_verdict(m, parse_z(z_text), cfg);
      io::RunManifest man{"probe", io::operator_hash(a)};
      const auto d = cfg.deltas();
      man.parameters = {{"grid", grid},
                        {"eps", cfg.eps_list},
                        {"samples_per_eps", cfg.samples_per_eps},
                        {"seed", cfg.seed},
                        {"delta_grid", Json{{"count", d.size()}, {"min", d.front()}, {"max", d.back()}}},
                        {"coverage_resolution", cfg.coverage_resolution},
                        {"support_grid", cfg.support_grid}};
      const std::string text = io::dump(wrap(man, "probe", io::to_json(r), true));
      if (!out_path.empty()) io::write_file(out_path, text);
      if (!cloud_path.empty()) {
        std::string csv = "preimage,eps,re,im\n";
        for (std::size_t p = 0; p < r.preimages.size(); ++p)
          for (std::size_t e = 0; e < cfg.eps_list.size(); ++e) {
            const std::uint64_t s = cfg.seed + 0x9e3779b97f4a7c15ULL * (e + 1);
            for (Complex w : cap_image(a, r.preimages[p].x, cfg.eps_list[e], cfg.samples_per_eps, s))
              csv += std::to_string(p) + ',' + io::format_real(cfg.eps_list[e]) + ',' + io::format_real(w.real()) + ',' +
                     io::format_real(w.imag()) + '\n';
          }
        io::write_file(cloud_path, csv);
      }
      if (json) {
        out << text;
      } else {
        out << "verdict " << to_string(r.verdict) << " (weak: " << to_string(r.weak_verdict) << ") at " << fmt(r.z) << '\n';
        for (const auto& p : r.preimages) {
          out << "  preimage via " << p.construction << ": " << to_string(p.verdict) << '\n';
          for (const auto& e : p.records)
            out << "    eps " << fmt(e.eps) << "  defect " << fmt(e.convexity_defect) << "  delta_max "
                << fmt(e.delta_max_covered) << "  deficit " << fmt(e.deficit) << "  noise " << fmt(e.noise) << '\n';
        }
      }
      return 0;
    }

    if (glist->parsed()) {
      const auto entries = gallery_list();
      if (json) {
        Json arr = Json::array();
        for (const auto& g : entries) arr.push_back({{"name", g.name}, {"params", g.params}, {"summary", g.summary}});
        out << io::dump(arr);
      } else {
        for (const auto& g : entries) out << std::left << std::setw(12) << g.name << std::setw(32) << g.params << g.summary << '\n';
      }
      return 0;
    }

    if (gbuild->parsed()) {
      std::map<std::string, Real> params;
      for (const auto& kv : gparams) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw InvalidInput("--param expects key=value, got " + kv);
        params[kv.substr(0, eq)] = parse_real(kv.substr(eq + 1), "parameter " + kv.substr(0, eq));
      }
      const GalleryOperator op = build_gallery(gname, params);
      std::string meta_out = out_path;
      if (meta_out.size() > 5 && meta_out.ends_with(".json")) meta_out.resize(meta_out.size() - 5);
      meta_out += ".meta.json";
      io::write_file(out_path, io::matrix_json(op.matrix));
      io::write_file(meta_out, io::dump(io::metadata_json(op.metadata, op.matrix, op.name)));
      if (json) {
        Json j{{"name", op.name}, {"dim", op.matrix.rows()}, {"operator_hash", io::operator_hash(op.matrix)},
               {"matrix", out_path}, {"metadata", meta_out}};
        out << io::dump(j);
      } else {
        out << op.name << " (" << op.matrix.rows() << "x" << op.matrix.cols() << ") -> " << out_path << ", " << meta_out
            << '\n';
      }
      return 0;
    }

    if (plot->parsed()) {
      const auto rows = io::parse_boundary_csv(io::read_file(boundary_csv_path));
      std::vector<io::CurveRow> crow;
      if (!curves_csv_path.empty()) crow = io::parse_curves_csv(io::read_file(curves_csv_path));
      io::write_file(out_path, io::render_svg(rows, crow));
      if (json)
        out << io::dump(Json{{"svg", out_path}, {"boundary_rows", rows.size()}, {"curve_rows", crow.size()}});
      else
        out << "wrote " << out_path << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    const int code = exit_code(e);
    err << io::dump(error_json(e, code), 0);
    return code;
  }
  return 2;
}

}  // namespace nrange::cli
