// Core dense types and error classes shared by every module.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace symlab {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A point of R^d. Dimension is carried at runtime.
template <typename Scalar>
using PointT = Vector<Scalar>;

using Point = PointT<double>;
using Vec = Vector<double>;
using Mat = Matrix<double>;

inline constexpr double kPi = std::numbers::pi;

/// Malformed arguments: wrong dimension, violated preconditions on parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A query the numerics cannot answer faithfully (outside the trusted window,
/// below the resolution floor, violated bound hypotheses).
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver stopped before its certificate closed.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double gap)
      : std::runtime_error(what + " (gap " + std::to_string(gap) + ")"), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// Quadrature refinement failed to settle; carries the two finest estimates.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double coarse, double fine)
      : std::runtime_error(what), coarse_(coarse), fine_(fine) {}
  double coarse() const noexcept { return coarse_; }
  double fine() const noexcept { return fine_; }

 private:
  double coarse_;
  double fine_;
};

/// Unknown generator/kernel or inconsistent experiment settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resolution floor: no functional is evaluated below this many atom spacings.
inline constexpr double kResolutionFloorFactor = 20.0;

/// Largest multiple of r the transport window looks at.
inline constexpr double kTransportWindow = 4.0;

}  // namespace symlab
