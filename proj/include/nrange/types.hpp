#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nrange {

using Real = double;
using Complex = std::complex<Real>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Matrix = DenseMatrix<Real>;
using Vector = DenseVector<Real>;
using RealVector = Eigen::VectorXd;

inline constexpr Real kPi = std::numbers::pi;
inline constexpr Real kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

enum class Part { Real, Imaginary };

/// A point of the complex unit sphere. `norm_defect` keeps | ||x|| - 1 |.
struct UnitVector {
  Vector components;
  Real norm_defect = 0.0;

  UnitVector() = default;
  static UnitVector normalize(const Vector& v);

  Eigen::Index dim() const { return components.size(); }
};

// Error kinds. Each carries enough context for the CLI's JSON diagnostics.

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept = 0;
  /// Input errors map to exit code 2, numerical failures to 3.
  virtual bool is_input_error() const noexcept { return false; }
};

#define NRANGE_INPUT_ERROR(Name)                                      \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(what) {}           \
    const char* kind() const noexcept override { return #Name; }      \
    bool is_input_error() const noexcept override { return true; }    \
  };

NRANGE_INPUT_ERROR(InvalidInput)
NRANGE_INPUT_ERROR(DimensionMismatch)
NRANGE_INPUT_ERROR(BasisNotOrthonormal)
NRANGE_INPUT_ERROR(OutsideRange)
NRANGE_INPUT_ERROR(NotInRange)

#undef NRANGE_INPUT_ERROR

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, Real best_residual)
      : Error(what), best_residual(best_residual) {}
  const char* kind() const noexcept override { return "NoConvergence"; }
  Real best_residual;
};

class DegenerateNumericalRange : public Error {
 public:
  explicit DegenerateNumericalRange(const std::string& what) : Error(what) {}
  const char* kind() const noexcept override { return "DegenerateNumericalRange"; }
};

class BranchLost : public Error {
 public:
  BranchLost(const std::string& what, Real theta, Real overlap)
      : Error(what), theta(theta), overlap(overlap) {}
  const char* kind() const noexcept override { return "BranchLost"; }
  Real theta;
  Real overlap;
};

class ChordSearchFailed : public Error {
 public:
  ChordSearchFailed(const std::string& what, int attempts)
      : Error(what), attempts(attempts) {}
  const char* kind() const noexcept override { return "ChordSearchFailed"; }
  int attempts;
};

}  // namespace nrange
