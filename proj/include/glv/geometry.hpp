#pragma once

#include "glv/types.hpp"

#include <vector>

namespace glv {

/// Star-shaped domain about the origin with boundary
/// t -> rho(t) (cos t, sin t), t in [0, 2pi). The unit disc is rho == 1.
///
/// Boundary integrals carry the metric factor sqrt(rho^2 + rho'^2); the
/// parameter t is never reparametrized by arclength.
struct DomainSpec {
  enum class Kind { UnitDisc, StarShaped };

  Kind kind = Kind::UnitDisc;
  double rho0 = 1.0;
  std::vector<double> cos_coeffs;  // a_k, k = 1, 2, ...
  std::vector<double> sin_coeffs;  // b_k, k = 1, 2, ...
  double tubular_width = 0.2;

  static DomainSpec unit_disc();
  static DomainSpec unit_disc(double tubular_width);
  /// Validates positivity of rho and the tubular width; a non-positive
  /// `tubular_width` selects the default 0.2 * min rho.
  static DomainSpec star(double rho0, std::vector<double> cos_coeffs,
                         std::vector<double> sin_coeffs, double tubular_width = 0.0);

  bool is_disc() const { return kind == Kind::UnitDisc; }

  double rho(double t) const;
  double drho(double t) const;
  double d2rho(double t) const;
  double min_rho() const;
  double max_rho() const;

  /// Throws ParameterError if rho is not strictly positive or if the
  /// tubular band is too wide for single-valued nearest-point projection.
  void validate() const;
};

Vec2 boundary_point(const DomainSpec& spec, double t);
/// d/dt of boundary_point.
Vec2 boundary_velocity(const DomainSpec& spec, double t);
/// |d/dt boundary_point| = sqrt(rho^2 + rho'^2).
double boundary_speed(const DomainSpec& spec, double t);
/// Positively oriented unit tangent.
Vec2 tangent(const DomainSpec& spec, double t);
Vec2 outward_normal(const DomainSpec& spec, double t);
/// Signed curvature (positive for convex parts).
double curvature(const DomainSpec& spec, double t);
/// Arclength of the boundary between parameters t0 <= t1.
double arclength(const DomainSpec& spec, double t0, double t1);
double perimeter(const DomainSpec& spec);

/// Parameter of the nearest boundary point. Closed form on the disc, sampled
/// minimization with Newton polish otherwise.
double project_to_boundary(const DomainSpec& spec, const Vec2& x);
double distance_to_boundary(const DomainSpec& spec, const Vec2& x);
/// Strictly inside the closed curve.
bool contains(const DomainSpec& spec, const Vec2& x);

/// Polar coordinates about a boundary point, angle measured counterclockwise
/// from the positive tangent. Interior directions have theta in (0, pi);
/// the returned angle lies in (-pi/2, 3pi/2].
struct LocalPolar {
  double r;
  double theta;
};
LocalPolar local_polar(const DomainSpec& spec, double t0, const Vec2& x);
LocalPolar local_polar(const DomainSpec& spec, const Vec2& x0, const Vec2& x);

/// Parameters t_plus > t0 > t_minus where the circle of radius r about
/// boundary_point(t0) first meets the boundary going forward and backward.
struct BoundaryCrossings {
  double t_plus;
  double t_minus;
};
BoundaryCrossings circle_boundary_crossings(const DomainSpec& spec, double t0, double r);

/// The angles theta_1(r), theta_2(r) bounding omega_r(x0) in local polar
/// coordinates.
struct ArcAngles {
  double theta1;
  double theta2;
};
ArcAngles boundary_arc_angles(const DomainSpec& spec, double t0, double r);

/// Anchor field g(t) = (cos phase(t), sin phase(t)) with a lifted phase
/// whose total increment is 2 pi * declared_degree.
struct BoundaryData {
  enum class Kind { Tangent, Fourier };

  DomainSpec domain;
  Kind kind = Kind::Tangent;
  int declared_degree = 1;
  double phase0 = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  /// g = tau, the positively oriented unit tangent (degree 1).
  static BoundaryData tangent(DomainSpec domain);
  /// phase(t) = degree * t + phase0 + sum_k a_k cos kt + b_k sin kt.
  static BoundaryData fourier(DomainSpec domain, int degree, double phase0 = 0.0,
                              std::vector<double> cos_coeffs = {},
                              std::vector<double> sin_coeffs = {});

  double phase(double t) const;
  double dphase(double t) const;
  Vec2 g(double t) const;
  Vec2 g_perp(double t) const;

  /// Sum of wrapped phase increments of g over `samples` boundary points,
  /// divided by 2 pi.
  double sampled_winding(int samples = 4096) const;
  void validate() const;
};

/// g(Pi(x)) for x within the tubular band; OutOfBandError otherwise.
Vec2 extend_g(const BoundaryData& data, const Vec2& x);

template <typename Derived>
Point2<typename Derived::Scalar> g_perp(const Eigen::MatrixBase<Derived>& v) {
  return perp(v);
}

}  // namespace glv
