#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace glv {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec2 = Point2<double>;

/// Per-vertex field of 2-vectors, one row per vertex. Row-major so the
/// storage doubles as a flat vector of length 2N (see flat()).
template <typename Scalar>
using Field2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2, Eigen::RowMajor>;

using VectorField = Field2<double>;

inline Eigen::Map<Eigen::VectorXd> flat(VectorField& f) {
  return {f.data(), f.size()};
}
inline Eigen::Map<const Eigen::VectorXd> flat(const VectorField& f) {
  return {f.data(), f.size()};
}

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Rotation by +pi/2.
template <typename Derived>
Point2<typename Derived::Scalar> perp(const Eigen::MatrixBase<Derived>& v) {
  return {-v(1), v(0)};
}

/// 2-D cross product a x b.
template <typename A, typename B>
typename A::Scalar cross(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a(0) * b(1) - a(1) * b(0);
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a <= -kPi ? a + kTwoPi : a;
}

// Error hierarchy. The CLI maps ConfigError to exit code 2, TopologyError to
// 4 and everything else to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OutOfBandError : public Error {
 public:
  using Error::Error;
};

class DegeneratePointError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class SeedSeparationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDomainError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Topological failures: charge bookkeeping, windings, identity audits.
class TopologyError : public Error {
 public:
  using Error::Error;
};

class UndefinedNormalizationError : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class NonIntegerWindingError : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class IndeterminateOrientationError : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class InconsistentIndexError : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class ClusteringOverflowError : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class TopologyAuditError : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

}  // namespace glv
