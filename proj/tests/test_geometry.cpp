#include "support.hpp"

#include <doctest.h>

using namespace glv;
using namespace glv::test;

TEST_CASE("disc and star boundary points") {
  const DomainSpec disc = DomainSpec::unit_disc();
  CHECK((boundary_point(disc, 0.0) - Vec2(1, 0)).norm() < 1e-15);
  CHECK((boundary_point(disc, kPi) - Vec2(-1, 0)).norm() < 1e-15);
  const DomainSpec star = DomainSpec::star(1.0, {0.1}, {});
  CHECK((boundary_point(star, 0.0) - Vec2(1.1, 0)).norm() < 1e-15);
}

TEST_CASE("tangents") {
  const DomainSpec disc = DomainSpec::unit_disc();
  CHECK((tangent(disc, 0.0) - Vec2(0, 1)).norm() < 1e-15);
  CHECK((tangent(disc, 0.5 * kPi) - Vec2(-1, 0)).norm() < 1e-15);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const DomainSpec star = random_star(rng);
    for (int k = 0; k < 50; ++k) {
      const double t = uniform(rng, 0.0, kTwoPi);
      CHECK(std::abs(tangent(star, t).norm() - 1.0) < 1e-14);
      // Outward normal points away from the origin on a star domain.
      CHECK(outward_normal(star, t).dot(boundary_point(star, t)) > 0.0);
    }
  }
}

TEST_CASE("perp rotates by a quarter turn") {
  CHECK((perp(Vec2(1, 0)) - Vec2(0, 1)).norm() == 0.0);
  CHECK((perp(Vec2(0, 1)) - Vec2(-1, 0)).norm() == 0.0);
}

TEST_CASE("perimeter against a brute-force polyline") {
  Rng rng(3);
  CHECK(perimeter(DomainSpec::unit_disc()) == doctest::Approx(kTwoPi).epsilon(1e-12));
  for (int trial = 0; trial < 5; ++trial) {
    const DomainSpec star = random_star(rng);
    const int n = 200000;
    double len = 0.0;
    for (int k = 0; k < n; ++k) {
      len += (boundary_point(star, kTwoPi * (k + 1) / n) - boundary_point(star, kTwoPi * k / n)).norm();
    }
    CHECK(perimeter(star) == doctest::Approx(len).epsilon(1e-8));
  }
}

TEST_CASE("curvature of the disc and of a star by finite differences") {
  CHECK(curvature(DomainSpec::unit_disc(), 1.3) == doctest::Approx(1.0));
  Rng rng(5);
  const DomainSpec star = random_star(rng);
  for (double t : {0.3, 1.7, 4.0}) {
    const double dt = 1e-5;
    const double a0 = std::atan2(tangent(star, t - dt).y(), tangent(star, t - dt).x());
    const double a1 = std::atan2(tangent(star, t + dt).y(), tangent(star, t + dt).x());
    const double kappa = wrap_angle(a1 - a0) / (2 * dt) / boundary_speed(star, t);
    CHECK(curvature(star, t) == doctest::Approx(kappa).epsilon(1e-6));
  }
}

TEST_CASE("invalid radius profile is rejected") {
  CHECK_THROWS_AS(DomainSpec::star(0.5, {0.6}, {}), ParameterError);
  CHECK_THROWS_AS(DomainSpec::unit_disc(1.5), ParameterError);
}

TEST_CASE("projection is the nearest boundary point (brute force)") {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const DomainSpec dom = trial == 0 ? DomainSpec::unit_disc() : random_star(rng);
    for (int k = 0; k < 30; ++k) {
      const double t = uniform(rng, 0.0, kTwoPi);
      const Vec2 x = boundary_point(dom, t) - uniform(rng, -0.1, 0.15) * outward_normal(dom, t);
      const double tp = project_to_boundary(dom, x);
      const double dp = (x - boundary_point(dom, tp)).norm();
      double best = 1e300;
      for (int j = 0; j < 20000; ++j) best = std::min(best, (x - boundary_point(dom, kTwoPi * j / 20000)).norm());
      CHECK(dp <= best + 1e-9);
      CHECK(distance_to_boundary(dom, x) == doctest::Approx(dp).epsilon(1e-9));
    }
  }
}

TEST_CASE("containment") {
  Rng rng(23);
  const DomainSpec disc = DomainSpec::unit_disc();
  for (int k = 0; k < 500; ++k) {
    const Vec2 x(uniform(rng, -1.3, 1.3), uniform(rng, -1.3, 1.3));
    if (std::abs(x.norm() - 1.0) < 1e-9) continue;
    CHECK(contains(disc, x) == (x.norm() < 1.0));
  }
  const DomainSpec star = random_star(rng);
  for (int k = 0; k < 200; ++k) {
    const double t = uniform(rng, 0.0, kTwoPi);
    const double f = uniform(rng, 0.0, 1.4);
    if (std::abs(f - 1.0) < 1e-6) continue;
    CHECK(contains(star, f * boundary_point(star, t)) == (f < 1.0));
  }
}

TEST_CASE("extended anchor field") {
  const DomainSpec disc = DomainSpec::unit_disc();
  const BoundaryData tau = BoundaryData::tangent(disc);
  CHECK((extend_g(tau, Vec2(0.95, 0)) - Vec2(0, 1)).norm() < 1e-14);
  CHECK((extend_g(tau, boundary_point(disc, 2.0)) - tangent(disc, 2.0)).norm() < 1e-14);
  CHECK_THROWS_AS(extend_g(tau, Vec2(0, 0)), OutOfBandError);

  // Constant along normal segments.
  Rng rng(29);
  const DomainSpec star = random_star(rng);
  const BoundaryData data = random_fourier_data(rng, star, 2);
  for (int k = 0; k < 50; ++k) {
    const double t = uniform(rng, 0.0, kTwoPi);
    const Vec2 x = boundary_point(star, t) - uniform(rng, 0.0, 0.9 * star.tubular_width) * outward_normal(star, t);
    const Vec2 xp = boundary_point(star, project_to_boundary(star, x));
    CHECK((extend_g(data, x) - extend_g(data, xp)).norm() < 1e-12);
  }
}

TEST_CASE("anchor field is unit, orthogonal to its perp and has the declared winding") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const DomainSpec dom = random_star(rng);
    const int degree = uniform_int(rng, 1, 4);
    const BoundaryData data = trial % 4 == 0 ? BoundaryData::tangent(dom) : random_fourier_data(rng, dom, degree);
    for (int k = 0; k < 40; ++k) {
      const double t = uniform(rng, 0.0, kTwoPi);
      CHECK(std::abs(data.g(t).norm() - 1.0) < 1e-15);
      CHECK(std::abs(data.g(t).dot(data.g_perp(t))) < 1e-15);
    }
    CHECK(std::lround(data.sampled_winding()) == data.declared_degree);
    CHECK(std::abs(data.sampled_winding() - data.declared_degree) < 1e-9);
    CHECK((data.phase(kTwoPi) - data.phase(0.0)) / kTwoPi == doctest::Approx(data.declared_degree));
  }
}

TEST_CASE("tangent field matches the domain tangent") {
  Rng rng(37);
  const DomainSpec star = random_star(rng);
  const BoundaryData tau = BoundaryData::tangent(star);
  for (double t : {0.0, 1.0, 2.5, 5.9}) CHECK((tau.g(t) - tangent(star, t)).norm() < 1e-12);
}

TEST_CASE("local polar coordinates") {
  const DomainSpec disc = DomainSpec::unit_disc();
  const double h = 1e-3;
  const LocalPolar along = local_polar(disc, Vec2(1, 0), Vec2(std::cos(h), std::sin(h)) * (1.0 - 1e-9));
  CHECK(std::abs(along.theta) < h);
  CHECK(along.r == doctest::Approx(h).epsilon(1e-3));
  const LocalPolar inward = local_polar(disc, Vec2(1, 0), Vec2(1 - h, 0));
  CHECK(inward.theta == doctest::Approx(0.5 * kPi).epsilon(1e-14));
  CHECK(inward.r == doctest::Approx(h).epsilon(1e-12));
  CHECK_THROWS_AS(local_polar(disc, Vec2(1, 0), Vec2(1, 0)), DegeneratePointError);

  Rng rng(41);
  const DomainSpec star = random_star(rng);
  for (int k = 0; k < 100; ++k) {
    const double t0 = uniform(rng, 0.0, kTwoPi);
    const double t = uniform(rng, 0.0, kTwoPi);
    const Vec2 x = boundary_point(star, t) * uniform(rng, 0.05, 0.98);
    if ((x - boundary_point(star, t0)).norm() > 0.3) continue;
    const LocalPolar lp = local_polar(star, t0, x);
    CHECK(lp.theta > -0.5 * kPi);
    CHECK(lp.theta <= 1.5 * kPi);
  }
}

TEST_CASE("arc angles on the disc match the inscribed-angle formula") {
  // On the unit circle a chord of length r makes angle asin(r/2) with the tangent.
  const DomainSpec disc = DomainSpec::unit_disc();
  for (double r : {0.4, 0.2, 0.1, 0.05, 0.01}) {
    const ArcAngles a = boundary_arc_angles(disc, 0.7, r);
    CHECK(a.theta1 == doctest::Approx(std::asin(0.5 * r)).epsilon(1e-8));
    CHECK(kPi - a.theta2 == doctest::Approx(std::asin(0.5 * r)).epsilon(1e-8));
    const BoundaryCrossings c = circle_boundary_crossings(disc, 0.7, r);
    CHECK((boundary_point(disc, c.t_plus) - boundary_point(disc, 0.7)).norm() == doctest::Approx(r).epsilon(1e-10));
    CHECK((boundary_point(disc, c.t_minus) - boundary_point(disc, 0.7)).norm() == doctest::Approx(r).epsilon(1e-10));
    CHECK(c.t_plus > 0.7);
    CHECK(c.t_minus < 0.7);
  }
}

TEST_CASE("arc angle bounds are linear in r with one constant") {
  Rng rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const DomainSpec star = random_star(rng);
    const double t0 = uniform(rng, 0.0, kTwoPi);
    std::vector<double> ratios;
    for (int k = 0; k < 10; ++k) {
      const double r = 0.2 * std::pow(0.5, k);
      const ArcAngles a = boundary_arc_angles(star, t0, r);
      ratios.push_back(std::max(std::abs(a.theta1), std::abs(kPi - a.theta2)) / r);
    }
    const double c = *std::max_element(ratios.begin(), ratios.end());
    CHECK(c < 5.0);
    // The ratio settles to half the curvature as r -> 0.
    CHECK(std::abs(ratios[9] - ratios[8]) < 0.05 * c + 1e-6);
  }
}
