#include "glv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace glv {

namespace {

constexpr int kProjectionSamples = 720;

double fourier_sum(const std::vector<double>& a, const std::vector<double>& b, double t,
                   int derivative) {
  double s = 0.0;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i + 1);
    const double ak = i < a.size() ? a[i] : 0.0;
    const double bk = i < b.size() ? b[i] : 0.0;
    const double c = std::cos(k * t);
    const double sn = std::sin(k * t);
    switch (derivative) {
      case 0: s += ak * c + bk * sn; break;
      case 1: s += k * (-ak * sn + bk * c); break;
      default: s += -k * k * (ak * c + bk * sn); break;
    }
  }
  return s;
}

double positive_mod(double t) {
  double r = std::fmod(t, kTwoPi);
  return r < 0 ? r + kTwoPi : r;
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr double kGaussX[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGaussW[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};

}  // namespace

DomainSpec DomainSpec::unit_disc() { return unit_disc(0.2); }

DomainSpec DomainSpec::unit_disc(double tubular_width) {
  DomainSpec d;
  d.kind = Kind::UnitDisc;
  d.tubular_width = tubular_width;
  d.validate();
  return d;
}

DomainSpec DomainSpec::star(double rho0, std::vector<double> cos_coeffs,
                            std::vector<double> sin_coeffs, double tubular_width) {
  DomainSpec d;
  d.kind = Kind::StarShaped;
  d.rho0 = rho0;
  d.cos_coeffs = std::move(cos_coeffs);
  d.sin_coeffs = std::move(sin_coeffs);
  d.tubular_width = tubular_width > 0.0 ? tubular_width : 0.2 * d.min_rho();
  d.validate();
  return d;
}

double DomainSpec::rho(double t) const {
  if (is_disc()) return 1.0;
  return rho0 + fourier_sum(cos_coeffs, sin_coeffs, t, 0);
}

double DomainSpec::drho(double t) const {
  if (is_disc()) return 0.0;
  return fourier_sum(cos_coeffs, sin_coeffs, t, 1);
}

double DomainSpec::d2rho(double t) const {
  if (is_disc()) return 0.0;
  return fourier_sum(cos_coeffs, sin_coeffs, t, 2);
}

double DomainSpec::min_rho() const {
  if (is_disc()) return 1.0;
  double m = rho(0.0);
  for (int i = 1; i < 2048; ++i) m = std::min(m, rho(kTwoPi * i / 2048.0));
  return m;
}

double DomainSpec::max_rho() const {
  if (is_disc()) return 1.0;
  double m = rho(0.0);
  for (int i = 1; i < 2048; ++i) m = std::max(m, rho(kTwoPi * i / 2048.0));
  return m;
}

void DomainSpec::validate() const {
  if (!(tubular_width > 0.0)) throw ParameterError("tubular_width must be positive");
  if (is_disc()) {
    if (tubular_width >= 1.0) throw ParameterError("tubular_width must be < 1 on the unit disc");
    return;
  }
  if (!(min_rho() > 0.0)) throw ParameterError("radius profile must be strictly positive");

  // Reach check by sampling: curvature bound and a bottleneck condition
  // (points an arclength pi*delta apart must be at least 2*delta apart).
  constexpr int n = 360;
  std::vector<Vec2> pts(n);
  std::vector<double> s(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double t = kTwoPi * i / n;
    pts[i] = boundary_point(*this, t);
    if (tubular_width * std::abs(curvature(*this, t)) >= 1.0) {
      throw ParameterError("tubular_width exceeds the local radius of curvature");
    }
  }
  for (int i = 0; i < n; ++i) s[i + 1] = s[i] + arclength(*this, kTwoPi * i / n, kTwoPi * (i + 1) / n);
  const double total = s[n];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double along = std::min(s[j] - s[i], total - (s[j] - s[i]));
      if (along >= kPi * tubular_width && (pts[i] - pts[j]).norm() < 2.0 * tubular_width) {
        throw ParameterError("tubular_width exceeds the boundary bottleneck distance");
      }
    }
  }
}

Vec2 boundary_point(const DomainSpec& spec, double t) {
  const double r = spec.rho(t);
  return {r * std::cos(t), r * std::sin(t)};
}

Vec2 boundary_velocity(const DomainSpec& spec, double t) {
  const double r = spec.rho(t);
  const double dr = spec.drho(t);
  const double c = std::cos(t);
  const double s = std::sin(t);
  return {dr * c - r * s, dr * s + r * c};
}

double boundary_speed(const DomainSpec& spec, double t) {
  const double r = spec.rho(t);
  const double dr = spec.drho(t);
  return std::sqrt(r * r + dr * dr);
}

Vec2 tangent(const DomainSpec& spec, double t) {
  if (spec.is_disc()) return {-std::sin(t), std::cos(t)};
  return boundary_velocity(spec, t).normalized();
}

Vec2 outward_normal(const DomainSpec& spec, double t) { return -perp(tangent(spec, t)); }

double curvature(const DomainSpec& spec, double t) {
  const double r = spec.rho(t);
  const double dr = spec.drho(t);
  const double ddr = spec.d2rho(t);
  const double q = r * r + dr * dr;
  return (r * r + 2.0 * dr * dr - r * ddr) / (q * std::sqrt(q));
}

double arclength(const DomainSpec& spec, double t0, double t1) {
  if (spec.is_disc()) return t1 - t0;
  const double half = 0.5 * (t1 - t0);
  const double mid = 0.5 * (t1 + t0);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += kGaussW[i] * boundary_speed(spec, mid + half * kGaussX[i]);
  return s * half;
}

double perimeter(const DomainSpec& spec) {
  if (spec.is_disc()) return kTwoPi;
  double s = 0.0;
  for (int i = 0; i < 64; ++i) s += arclength(spec, kTwoPi * i / 64, kTwoPi * (i + 1) / 64);
  return s;
}

double project_to_boundary(const DomainSpec& spec, const Vec2& x) {
  if (spec.is_disc()) {
    const double n = x.norm();
    if (n == 0.0) throw DegeneratePointError("projection of the disc center is not unique");
    return positive_mod(std::atan2(x.y(), x.x()));
  }
  double best_t = 0.0;
  double best_d = (boundary_point(spec, 0.0) - x).squaredNorm();
  for (int i = 1; i < kProjectionSamples; ++i) {
    const double t = kTwoPi * i / kProjectionSamples;
    const double d = (boundary_point(spec, t) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  // Newton polish on f(t) = <r(t) - x, r'(t)>.
  double t = best_t;
  for (int it = 0; it < 30; ++it) {
    const double r = spec.rho(t);
    const double dr = spec.drho(t);
    const double ddr = spec.d2rho(t);
    const Vec2 er(std::cos(t), std::sin(t));
    const Vec2 et(-std::sin(t), std::cos(t));
    const Vec2 p = r * er;
    const Vec2 v = dr * er + r * et;
    const Vec2 a = (ddr - r) * er + 2.0 * dr * et;
    const double f = (p - x).dot(v);
    const double df = v.squaredNorm() + (p - x).dot(a);
    if (df <= 0.0) break;
    const double step = f / df;
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  if ((boundary_point(spec, t) - x).squaredNorm() > best_d) t = best_t;
  return positive_mod(t);
}

double distance_to_boundary(const DomainSpec& spec, const Vec2& x) {
  if (spec.is_disc()) return std::abs(1.0 - x.norm());
  return (boundary_point(spec, project_to_boundary(spec, x)) - x).norm();
}

bool contains(const DomainSpec& spec, const Vec2& x) {
  const double n = x.norm();
  if (n == 0.0) return true;
  return n < spec.rho(std::atan2(x.y(), x.x()));
}

LocalPolar local_polar(const DomainSpec& spec, double t0, const Vec2& x) {
  const Vec2 x0 = boundary_point(spec, t0);
  const Vec2 v = x - x0;
  const double r = v.norm();
  if (r == 0.0) throw DegeneratePointError("local polar coordinates undefined at the center");
  const Vec2 tau = tangent(spec, t0);
  double theta = std::atan2(cross(tau, v), tau.dot(v));
  if (theta <= -0.5 * kPi) theta += kTwoPi;
  return {r, theta};
}

LocalPolar local_polar(const DomainSpec& spec, const Vec2& x0, const Vec2& x) {
  if ((x - x0).norm() == 0.0) {
    throw DegeneratePointError("local polar coordinates undefined at the center");
  }
  return local_polar(spec, project_to_boundary(spec, x0), x);
}

BoundaryCrossings circle_boundary_crossings(const DomainSpec& spec, double t0, double r) {
  if (!(r > 0.0)) throw ParameterError("crossing radius must be positive");
  const Vec2 x0 = boundary_point(spec, t0);
  auto first_crossing = [&](double direction) {
    constexpr int steps = 4096;
    const double dt = kTwoPi / steps;
    double prev = 0.0;
    for (int i = 1; i < steps; ++i) {
      const double d = i * dt;
      if ((boundary_point(spec, t0 + direction * d) - x0).norm() >= r) {
        double lo = prev;
        double hi = d;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          if ((boundary_point(spec, t0 + direction * mid) - x0).norm() >= r) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
      prev = d;
    }
    throw ResolutionError("circle does not meet the boundary: radius too large");
  };
  const double dp = first_crossing(1.0);
  const double dm = first_crossing(-1.0);
  return {t0 + dp, t0 - dm};
}

ArcAngles boundary_arc_angles(const DomainSpec& spec, double t0, double r) {
  const auto c = circle_boundary_crossings(spec, t0, r);
  return {local_polar(spec, t0, boundary_point(spec, c.t_plus)).theta,
          local_polar(spec, t0, boundary_point(spec, c.t_minus)).theta};
}

BoundaryData BoundaryData::tangent(DomainSpec domain) {
  BoundaryData b;
  b.domain = std::move(domain);
  b.kind = Kind::Tangent;
  b.declared_degree = 1;
  b.validate();
  return b;
}

BoundaryData BoundaryData::fourier(DomainSpec domain, int degree, double phase0,
                                   std::vector<double> cos_coeffs,
                                   std::vector<double> sin_coeffs) {
  BoundaryData b;
  b.domain = std::move(domain);
  b.kind = Kind::Fourier;
  b.declared_degree = degree;
  b.phase0 = phase0;
  b.cos_coeffs = std::move(cos_coeffs);
  b.sin_coeffs = std::move(sin_coeffs);
  b.validate();
  return b;
}

double BoundaryData::phase(double t) const {
  if (kind == Kind::Tangent) {
    // Angle of r'(t) = rho e_theta + rho' e_r relative to e_theta.
    return t + 0.5 * kPi + std::atan2(-domain.drho(t), domain.rho(t));
  }
  return declared_degree * t + phase0 + fourier_sum(cos_coeffs, sin_coeffs, t, 0);
}

double BoundaryData::dphase(double t) const {
  if (kind == Kind::Tangent) {
    const double r = domain.rho(t);
    const double dr = domain.drho(t);
    const double ddr = domain.d2rho(t);
    return 1.0 + (dr * dr - r * ddr) / (r * r + dr * dr);
  }
  return declared_degree + fourier_sum(cos_coeffs, sin_coeffs, t, 1);
}

Vec2 BoundaryData::g(double t) const {
  const double p = phase(t);
  return {std::cos(p), std::sin(p)};
}

Vec2 BoundaryData::g_perp(double t) const { return perp(g(t)); }

double BoundaryData::sampled_winding(int samples) const {
  double total = 0.0;
  Vec2 prev = g(0.0);
  for (int i = 1; i <= samples; ++i) {
    const Vec2 cur = g(kTwoPi * i / samples);
    total += std::atan2(cross(prev, cur), prev.dot(cur));
    prev = cur;
  }
  return total / kTwoPi;
}

void BoundaryData::validate() const {
  if (declared_degree < 1) throw ParameterError("boundary data degree must be >= 1");
  const double w = sampled_winding();
  if (std::abs(w - declared_degree) > 1e-6) {
    std::ostringstream os;
    os << "boundary phase winds " << w << " times, declared degree " << declared_degree;
    throw TopologyError(os.str());
  }
}

Vec2 extend_g(const BoundaryData& data, const Vec2& x) {
  const DomainSpec& spec = data.domain;
  if (spec.is_disc() && x.norm() == 0.0) {
    throw OutOfBandError("point outside the tubular band");
  }
  const double t = project_to_boundary(spec, x);
  if ((boundary_point(spec, t) - x).norm() >= spec.tubular_width) {
    throw OutOfBandError("point outside the tubular band");
  }
  return data.g(t);
}

}  // namespace glv
