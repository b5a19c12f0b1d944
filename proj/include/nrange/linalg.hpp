#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nrange/types.hpp"

namespace nrange {

/// Throws InvalidInput unless `a` is a non-empty square matrix with finite entries.
void validate_square(const Matrix& a);

/// Hermitian part of e^{-i theta} A (Part::Real) or its skew counterpart
/// (Part::Imaginary): (e^{-i theta}A + e^{i theta}A*)/2 and (e^{-i theta}A - e^{i theta}A*)/2i.
template <typename Derived>
DenseMatrix<typename Derived::RealScalar> cartesian_part(const Eigen::MatrixBase<Derived>& a,
                                                         typename Derived::RealScalar theta,
                                                         Part which) {
  using R = typename Derived::RealScalar;
  using C = std::complex<R>;
  if (a.rows() != a.cols()) throw InvalidInput("cartesian_part: matrix is not square");
  const C rot = std::polar(R(1), -theta);
  const DenseMatrix<R> b = rot * a.derived();
  DenseMatrix<R> out(b.rows(), b.cols());
  if (which == Part::Real) {
    out = (b + b.adjoint()) * R(0.5);
  } else {
    out = (b - b.adjoint()) * C(0, R(-0.5));
  }
  // Force exact Hermitian symmetry on the diagonal and mirror entries.
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out(j, j) = C(out(j, j).real(), R(0));
    for (Eigen::Index i = j + 1; i < out.rows(); ++i) out(j, i) = std::conj(out(i, j));
  }
  return out;
}

/// f_A(x) = <Ax, x> = x* A x.
template <typename Derived, typename VDerived>
std::complex<typename Derived::RealScalar> range_map(const Eigen::MatrixBase<Derived>& a,
                                                     const Eigen::MatrixBase<VDerived>& x) {
  return x.dot(a * x);
}

Complex evaluate_range_map(const Matrix& a, const UnitVector& x);

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns, phase fixed
  Real residual = 0.0;     // max_j ||H v_j - lambda_j v_j||
  Real hermitian_defect = 0.0;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Full Hermitian eigendecomposition. Inputs off Hermitian by more than
/// 1e-10 ||H||_F are symmetrized first; the defect is recorded.
SpectralDecomposition hermitian_eig(const Matrix& h);

/// Eigenvalues only (ascending); cheaper when vectors are not needed.
RealVector hermitian_eigenvalues(const Matrix& h);

/// All eigenvalues plus an orthonormal basis of the eigenspace of every
/// eigenvalue within gap_tol of the largest one (columns ascending, phase fixed).
struct TopEigenspace {
  RealVector eigenvalues;
  Matrix vectors;
  Real residual = 0.0;
};
TopEigenspace top_eigenspace(const Matrix& h, Real gap_tol);

/// Rotates `v` so that its largest-magnitude entry (lowest index on ties) is
/// real and positive.
void fix_phase(Eigen::Ref<Vector> v);

/// Compression onto an orthonormal set: entry (i, j) = <A b_j, b_i>.
Matrix compress(const Matrix& a, std::span<const UnitVector> basis);
Matrix compress(const Matrix& a, const Matrix& basis_columns);

Real spectral_norm(const Matrix& a);
Real frobenius_norm(const Matrix& a);
bool is_normal(const Matrix& a, Real rel_tol = 1e-10);

/// I.i.d. uniform samples on the complex unit sphere of C^dim.
std::vector<UnitVector> sample_sphere(int dim, std::uint64_t seed, int count);

/// Samples from the open cap {y : ||y - x|| < eps} by perturbing x and renormalizing,
/// rejecting anything outside the cap.
std::vector<UnitVector> sample_cap(const UnitVector& x, Real eps, std::uint64_t seed, int count);

}  // namespace nrange
