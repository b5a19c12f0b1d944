#include "nrange/gallery.hpp"

#include <algorithm>
#include <cmath>

namespace nrange {

bool EssentialRange::meets_line(Real theta, Real mu, Real tol) const {
  const Complex rot = std::polar(1.0, -theta);
  for (Complex p : points)
    if (std::abs((rot * p).real() - mu) <= tol) return true;
  // The disk lies in the closed half-plane; it meets the line iff its support reaches mu.
  if (disk_center && std::abs((rot * *disk_center).real() + disk_radius - mu) <= tol) return true;
  return false;
}

bool EssentialRange::contains(Complex z, Real tol) const {
  for (Complex p : points)
    if (std::abs(z - p) <= tol) return true;
  return disk_center && std::abs(z - *disk_center) <= disk_radius + tol;
}

Real volterra_branch(int n, Real theta) {
  const Real den = 2.0 * theta + 2.0 * n * kPi;
  if (std::abs(den) < 1e-300) return 0.5;
  if (n == 0 && std::abs(theta) < 1e-8) return 0.5 - theta * theta / 12.0;
  return std::sin(theta) / den;
}

Real volterra_support(Real theta) {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0) theta += kTwoPi;
  Real best = 0.0;
  if (theta < 1e-8 || kTwoPi - theta < 1e-8) return 0.5;
  // Largest value comes from the denominator of the right sign closest to zero.
  for (int n = -3; n <= 3; ++n) best = std::max(best, volterra_branch(n, theta));
  return best;
}

Complex volterra_boundary(Real t) {
  return Complex(1.0 - std::cos(t), t - std::sin(t)) / (t * t);
}

std::optional<Real> GalleryOperator::exact_support(Real theta) const {
  if (metadata.support_oracle == "volterra") return volterra_support(theta);
  return std::nullopt;
}

std::optional<Real> GalleryOperator::exact_branch(int n, Real theta) const {
  if (metadata.branch_oracle == "volterra") return volterra_branch(n, theta);
  return std::nullopt;
}

GalleryOperator volterra_section(int N) {
  if (N < 4) throw InvalidInput("volterra_section: N must be >= 4");
  const int dim = 2 * N + 1;
  GalleryOperator op;
  op.name = "volterra";
  op.matrix = Matrix::Zero(dim, dim);
  Matrix& m = op.matrix;
  // <V e_n, e_m> with e_n(t) = exp(2 pi i n t); V e_n = (e_n - 1)/(2 pi i n), V e_0 = t.
  m(volterra_index(0, N), volterra_index(0, N)) = 0.5;
  for (int n = -N; n <= N; ++n) {
    if (n == 0) continue;
    const Complex c = kI / (kTwoPi * n);
    m(volterra_index(n, N), volterra_index(n, N)) = -c;
    m(volterra_index(0, N), volterra_index(n, N)) = c;
    m(volterra_index(n, N), volterra_index(0, N)) = c;
  }
  auto& md = op.metadata;
  md.essential_range = EssentialRange{{0.0}, std::nullopt, 0.0, "{0}"};
  md.support_oracle = "volterra";
  md.branch_oracle = "volterra";
  const Complex top(0.0, 1.0 / kTwoPi);
  md.resolved_points = {
      {top, "strong", "unique preimage e^{-2 pi i t}; a single critical curve reaches this flat endpoint"},
      {-top, "strong", "unique preimage e^{2 pi i t}; a single critical curve reaches this flat endpoint"},
  };
  md.notes = "Fourier basis e_n = exp(2 pi i n t), n = -N..N; Re V = e_0 e_0^*/2 exactly; flat portion on the "
             "imaginary axis with endpoints +-i/(2 pi)";
  return op;
}

GalleryOperator weighted_shift(const std::vector<Complex>& weights, bool cyclic) {
  if (weights.empty()) throw InvalidInput("weighted_shift: need at least one weight");
  const int n = static_cast<int>(weights.size());
  const int dim = cyclic ? n : n + 1;
  GalleryOperator op;
  op.name = cyclic ? "cyclic_shift" : "weighted_shift";
  op.matrix = Matrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k) op.matrix((k + 1) % dim, k) = weights[k];
  op.metadata.notes = cyclic ? "cyclic weighted shift; W invariant under rotation by n-th roots of unity"
                             : "weighted shift; W is a disk centred at 0 (invariant under all rotations)";
  return op;
}

GalleryOperator normal_diag(const std::vector<Complex>& values, const std::vector<Complex>& declared_limits) {
  if (values.empty()) throw InvalidInput("normal_diag: need at least one value");
  GalleryOperator op;
  op.name = "normal_diag";
  const int dim = static_cast<int>(values.size());
  op.matrix = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) op.matrix(i, i) = values[i];
  op.metadata.declared_limit_extreme_points = declared_limits;
  return op;
}

GalleryOperator cjkls_block(Real b, Real k) {
  if (!(b > 0) || !(k > 0)) throw InvalidInput("cjkls_block: b and k must be positive");
  GalleryOperator op;
  op.name = "cjkls";
  op.matrix = Matrix::Zero(4, 4);
  Matrix& m = op.matrix;
  // Blocks [[0, ik], [ik, b +- ib]]: Re of each block is diag(0, b), so both ellipses
  // touch the imaginary axis at 0 from the right, mirrored in the real axis.
  m(0, 1) = m(1, 0) = Complex(0, k);
  m(1, 1) = Complex(b, b);
  m(2, 3) = m(3, 2) = Complex(0, k);
  m(3, 3) = Complex(b, -b);
  op.metadata.expected_singular_points = {0.0};
  op.metadata.notes = "conv of two ellipses meeting tangentially at 0; weak continuity of the inverse fails at 0";
  return op;
}

GalleryOperator direct_sum_scaled(int terms) {
  if (terms < 1) throw InvalidInput("direct_sum_scaled: terms must be >= 1");
  const Matrix a = cjkls_block(0.1, 0.1).matrix;
  const Matrix id = Matrix::Identity(4, 4);
  GalleryOperator op;
  op.name = "direct_sum";
  op.matrix = Matrix::Zero(4 * terms, 4 * terms);
  for (int j = 1; j <= terms; ++j) {
    const Complex rot = std::polar(1.0, kPi / j);
    op.matrix.block(4 * (j - 1), 4 * (j - 1), 4, 4) = rot * (id - a / static_cast<Real>(j)) - id;
    op.metadata.expected_singular_points.push_back(rot - 1.0);
  }
  op.metadata.notes = "truncated direct sum of rotated blocks e^{i pi/k}(I - A/k) - I, A = cjkls(0.1, 0.1); "
                      "declares only the singular points the truncation contains";
  return op;
}

GalleryOperator nilpotent_2x2() {
  GalleryOperator op = weighted_shift({1.0}, false);
  op.name = "nilpotent";
  return op;
}

GalleryOperator square_diag() {
  GalleryOperator op = normal_diag({1.0, kI, -1.0, -kI}, {});
  op.name = "square";
  return op;
}

GalleryOperator example1_diag(int K) {
  std::vector<Complex> v{0.0};
  for (int k = 1; k <= K; ++k) {
    v.emplace_back(1.0 / k, 1.0 / (Real(k) * k));
    v.emplace_back(-1.0 / k, 1.0 / (Real(k) * k));
  }
  GalleryOperator op = normal_diag(v, {0.0});
  op.name = "example1";
  op.metadata.essential_range = EssentialRange{{0.0}, std::nullopt, 0.0, "{0}"};
  op.metadata.notes = "truncated compact normal operator; 0 is a limit of extreme points";
  return op;
}

GalleryOperator example2_diag(int count) {
  std::vector<Complex> v;
  for (int k = 1; k <= count; ++k) v.push_back(std::polar(1.0, static_cast<Real>(k)));
  // Every point of the orbit is a limit of the others in the infinite operator.
  GalleryOperator op = normal_diag(v, v);
  op.name = "example2";
  op.metadata.essential_range = EssentialRange{{}, Complex(0.0), 1.0, "closed unit disk"};
  op.metadata.notes = "truncation of diag(tau^k), tau = e^{i}";
  return op;
}

std::vector<GalleryEntry> gallery_list() {
  return {
      {"volterra", "n (default 32)", "finite section of the Volterra operator in the Fourier basis, dim 2n+1"},
      {"shift", "n (default 8), w (default 1), cyclic (0/1)", "weighted shift with constant weight w, dim n"},
      {"nilpotent", "", "2x2 nilpotent, W is the disk of radius 1/2"},
      {"square", "", "diag(1, i, -1, -i)"},
      {"example1", "k (default 20)", "diag({0} and 1/k + i/k^2), declared limit point 0"},
      {"example2", "n (default 40)", "diag(tau^k), tau = e^{i}"},
      {"cjkls", "b (default 1), k (default 1)", "4x4 two-ellipse block example"},
      {"direct_sum", "m (default 3)", "truncated direct sum of rotated two-ellipse blocks"},
  };
}

namespace {

Real param(const std::map<std::string, Real>& p, const std::string& key, Real fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

int int_param(const std::map<std::string, Real>& p, const std::string& key, int fallback) {
  const Real v = param(p, key, fallback);
  if (v != std::floor(v)) throw InvalidInput("parameter " + key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

GalleryOperator build_gallery(const std::string& name, const std::map<std::string, Real>& p) {
  if (name == "volterra") return volterra_section(int_param(p, "n", 32));
  if (name == "shift") {
    const int n = int_param(p, "n", 8);
    const bool cyclic = param(p, "cyclic", 0.0) != 0.0;
    if (n < 2) throw InvalidInput("shift: n must be >= 2");
    std::vector<Complex> w(cyclic ? n : n - 1, param(p, "w", 1.0));
    return weighted_shift(w, cyclic);
  }
  if (name == "nilpotent") return nilpotent_2x2();
  if (name == "square") return square_diag();
  if (name == "example1") return example1_diag(int_param(p, "k", 20));
  if (name == "example2") return example2_diag(int_param(p, "n", 40));
  if (name == "cjkls") return cjkls_block(param(p, "b", 1.0), param(p, "k", 1.0));
  if (name == "direct_sum") return direct_sum_scaled(int_param(p, "m", 3));
  throw InvalidInput("unknown gallery operator: " + name);
}

}  // namespace nrange
