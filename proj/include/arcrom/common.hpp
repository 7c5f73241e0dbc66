#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace arcrom {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix sizes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Geometry or parameter outside the bounds of its family.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated at coincident points, or an observation point on an arc.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Operation requested on a representation that cannot support it.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Wrong kind of input for an operation (e.g. a self grid fed to a cross transform).
class MisuseError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular systems, non-convergence without fallback.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Not enough sampling nodes to resolve the requested order.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace arcrom
