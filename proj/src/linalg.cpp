#include "nrange/linalg.hpp"

#include <cmath>
#include <random>

namespace nrange {

UnitVector UnitVector::normalize(const Vector& v) {
  const Real n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("cannot normalize a zero or non-finite vector");
  UnitVector u;
  u.components = v / n;
  u.norm_defect = std::abs(u.components.norm() - 1.0);
  return u;
}

void validate_square(const Matrix& a) {
  if (a.rows() < 1 || a.rows() != a.cols()) throw InvalidInput("matrix must be square with dim >= 1");
  if (!a.allFinite()) throw InvalidInput("matrix has non-finite entries");
}

Complex evaluate_range_map(const Matrix& a, const UnitVector& x) {
  if (a.cols() != x.dim()) throw DimensionMismatch("evaluate_range_map: dimension mismatch");
  return range_map(a, x.components);
}

void fix_phase(Eigen::Ref<Vector> v) {
  Eigen::Index best = 0;
  Real best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Relative slack so that near-ties resolve to the lowest index deterministically.
    const Real m = std::abs(v(i));
    if (m > best_mag * (1.0 + 1e-12)) {
      best_mag = m;
      best = i;
    }
  }
  if (best_mag > 0.0) v *= std::conj(v(best)) / best_mag;
}

SpectralDecomposition hermitian_eig(const Matrix& h_in) {
  validate_square(h_in);
  SpectralDecomposition out;
  const Real fro = h_in.norm();
  Matrix h = h_in;
  const Real defect = (h_in - h_in.adjoint()).cwiseAbs().maxCoeff();
  out.hermitian_defect = defect;
  if (defect > 1e-10 * fro) h = (h_in + h_in.adjoint()) * 0.5;

  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NoConvergence("hermitian_eig: solver did not converge", -1.0);
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) fix_phase(out.eigenvectors.col(j));

  Real residual = 0.0;
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    const Vector r = h * out.eigenvectors.col(j) - out.eigenvalues(j) * out.eigenvectors.col(j);
    residual = std::max(residual, r.norm());
  }
  out.residual = residual;
  if (residual > 1e-9 * (1.0 + fro)) throw NoConvergence("hermitian_eig: residual above contract bound", residual);
  return out;
}

RealVector hermitian_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NoConvergence("hermitian_eigenvalues: solver did not converge", -1.0);
  return solver.eigenvalues();
}

namespace {

TopEigenspace top_from_full(const Matrix& h, Real gap_tol) {
  const SpectralDecomposition sd = hermitian_eig(h);
  const Eigen::Index n = sd.size();
  Eigen::Index m = 1;
  while (m < n && sd.eigenvalues(n - 1) - sd.eigenvalues(n - 1 - m) <= gap_tol) ++m;
  return {sd.eigenvalues, sd.eigenvectors.rightCols(m), sd.residual};
}

}  // namespace

TopEigenspace top_eigenspace(const Matrix& h, Real gap_tol) {
  const Eigen::Index n = h.rows();
  // Small problems and large clusters go straight to the full decomposition.
  if (n < 32) return top_from_full(h, gap_tol);
  const RealVector ev = hermitian_eigenvalues(h);
  const Real mu = ev(n - 1);
  Eigen::Index m = 1;
  while (m < n && mu - ev(n - 1 - m) <= gap_tol) ++m;
  if (m > 8 || m == n) return top_from_full(h, gap_tol);
  const Real scale = 1.0 + h.norm();
  const Real sep = mu - ev(n - 1 - m);
  if (sep < 1e-6 * scale) return top_from_full(h, gap_tol);

  // Shift-invert subspace iteration just above the top eigenvalue.
  const Real sigma = mu + std::max(1e-3 * sep, 1e-12 * scale);
  const Eigen::PartialPivLU<Matrix> lu(h - sigma * Matrix::Identity(n, n));
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<Real> normal(0.0, 1.0);
  Matrix x(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const Real re = normal(rng);
      const Real im = normal(rng);
      x(i, j) = Complex(re, im);
    }
  for (int it = 0; it < 8; ++it) {
    x = lu.solve(x);
    Eigen::HouseholderQR<Matrix> qr(x);
    x = qr.householderQ() * Matrix::Identity(n, m);
    Matrix k = x.adjoint() * h * x;
    k = (k + k.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> small(k);
    x = x * small.eigenvectors();
    Real residual = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
      residual = std::max(residual, (h * x.col(j) - small.eigenvalues()(j) * x.col(j)).norm());
    if (residual <= 1e-12 * scale) {
      for (Eigen::Index j = 0; j < m; ++j) fix_phase(x.col(j));
      return {ev, x, residual};
    }
  }
  return top_from_full(h, gap_tol);
}

Matrix compress(const Matrix& a, const Matrix& b) {
  if (b.rows() != a.rows()) throw DimensionMismatch("compress: basis dimension mismatch");
  const Matrix gram = b.adjoint() * b;
  const Real dev = (gram - Matrix::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) throw BasisNotOrthonormal("compress: basis Gram deviation " + std::to_string(dev));
  return b.adjoint() * a * b;
}

Matrix compress(const Matrix& a, std::span<const UnitVector> basis) {
  if (basis.empty()) throw InvalidInput("compress: empty basis");
  Matrix b(a.rows(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].dim() != a.rows()) throw DimensionMismatch("compress: basis dimension mismatch");
    b.col(static_cast<Eigen::Index>(j)) = basis[j].components;
  }
  return compress(a, b);
}

Real spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

Real frobenius_norm(const Matrix& a) { return a.norm(); }

bool is_normal(const Matrix& a, Real rel_tol) {
  const Real f = a.norm();
  const Matrix comm = a * a.adjoint() - a.adjoint() * a;
  return comm.norm() <= rel_tol * f * f;
}

namespace {

Vector gaussian_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<Real> normal(0.0, 1.0);
  Vector g(dim);
  for (int i = 0; i < dim; ++i) {
    const Real re = normal(rng);
    const Real im = normal(rng);
    g(i) = Complex(re, im);
  }
  return g;
}

}  // namespace

std::vector<UnitVector> sample_sphere(int dim, std::uint64_t seed, int count) {
  if (dim < 1) throw InvalidInput("sample_sphere: dim must be positive");
  std::mt19937_64 rng(seed);
  std::vector<UnitVector> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  while (static_cast<int>(out.size()) < count) {
    Vector g = gaussian_vector(dim, rng);
    if (g.norm() == 0.0) continue;
    out.push_back(UnitVector::normalize(g));
  }
  return out;
}

std::vector<UnitVector> sample_cap(const UnitVector& x, Real eps, std::uint64_t seed, int count) {
  if (!(eps > 0.0)) throw InvalidInput("sample_cap: eps must be positive");
  const int dim = static_cast<int>(x.dim());
  std::vector<UnitVector> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> unif(0.0, 1.0);
  while (static_cast<int>(out.size()) < count) {
    Vector g = gaussian_vector(dim, rng);
    const Real gn = g.norm();
    if (gn == 0.0) continue;
    Vector y;
    if (eps >= 2.0) {
      y = g / gn;
    } else {
      const Real step = 2.0 * eps * unif(rng);
      y = x.components + (step / gn) * g;
      const Real yn = y.norm();
      if (yn == 0.0) continue;
      y /= yn;
    }
    if ((y - x.components).norm() < eps) out.push_back(UnitVector::normalize(y));
  }
  return out;
}

}  // namespace nrange
