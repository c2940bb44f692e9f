#pragma once

// Hand-rolled generators for the property tests. Every generator draws from
// a caller-owned engine so failures reproduce from the printed seed.

#include "glv/minimizer.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace glv::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline int uniform_int(Rng& rng, int a, int b) {
  return std::uniform_int_distribution<int>(a, b)(rng);
}

/// Star domain with small Fourier wiggles; rho stays within [0.8, 1.2].
inline DomainSpec random_star(Rng& rng) {
  const int k = uniform_int(rng, 1, 3);
  std::vector<double> a(k), b(k);
  for (int i = 0; i < k; ++i) {
    a[i] = uniform(rng, -0.06, 0.06) / (i + 1);
    b[i] = uniform(rng, -0.06, 0.06) / (i + 1);
  }
  return DomainSpec::star(1.0, a, b);
}

inline BoundaryData random_fourier_data(Rng& rng, const DomainSpec& dom, int degree) {
  std::vector<double> a{uniform(rng, -0.5, 0.5), uniform(rng, -0.3, 0.3)};
  std::vector<double> b{uniform(rng, -0.5, 0.5), uniform(rng, -0.3, 0.3)};
  return BoundaryData::fourier(dom, degree, uniform(rng, -kPi, kPi), a, b);
}

/// Uniform point in the disc of radius r about the origin.
inline Vec2 random_point_in_disc(Rng& rng, double r) {
  const double rad = r * std::sqrt(uniform(rng, 0.0, 1.0));
  const double t = uniform(rng, 0.0, kTwoPi);
  return {rad * std::cos(t), rad * std::sin(t)};
}

/// Smooth-ish random field of moderate amplitude.
inline VectorField random_field(Rng& rng, const Mesh& mesh, double amplitude = 1.2) {
  const double kx = uniform(rng, 0.5, 3.0);
  const double ky = uniform(rng, 0.5, 3.0);
  const double ph = uniform(rng, 0.0, kTwoPi);
  VectorField u(mesh.num_vertices(), 2);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2 x = mesh.vertex(v);
    const double a = kx * x.x() + ky * x.y() + ph;
    const double m = amplitude * (0.6 + 0.4 * std::sin(3.0 * x.x() - 2.0 * x.y()));
    u(v, 0) = m * std::cos(a) + uniform(rng, -0.05, 0.05);
    u(v, 1) = m * std::sin(a) + uniform(rng, -0.05, 0.05);
  }
  return u;
}

inline VectorField constant_field(const Mesh& mesh, const Vec2& c) {
  VectorField u(mesh.num_vertices(), 2);
  for (int v = 0; v < mesh.num_vertices(); ++v) u.row(v) = c.transpose();
  return u;
}

/// u = f(x) (cos k phi, sin k phi) about `center`, with f supplied per radius.
template <typename F>
VectorField vortex_field(const Mesh& mesh, const Vec2& center, int k, F&& modulus) {
  VectorField u(mesh.num_vertices(), 2);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2 d = mesh.vertex(v) - center;
    const double a = k * std::atan2(d.y(), d.x());
    const double f = modulus(d.norm());
    u(v, 0) = f * std::cos(a);
    u(v, 1) = f * std::sin(a);
  }
  return u;
}

}  // namespace glv::test
