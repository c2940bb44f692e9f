#include "support.hpp"

#include "glv/defects.hpp"

#include <doctest.h>

#include <sstream>

using namespace glv;
using namespace glv::test;

namespace {

const DomainSpec kDisc = DomainSpec::unit_disc();
const BoundaryData kTau = BoundaryData::tangent(kDisc);

// (-y, x)/|x| equals tau on the unit circle.
VectorField rotating_field(const Mesh& m, double core) {
  VectorField u(m.num_vertices(), 2);
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Vec2 x = m.vertex(v);
    const double r = std::max(x.norm(), core);
    u.row(v) << -x.y() / r, x.x() / r;
  }
  return u;
}

MinimizeResult weak_pair_minimizer() {
  const Mesh m = triangulate(kDisc, 0.025);
  const EnergyParams p = EnergyParams::weak(0.1, 0.5);
  SeedSpec s;
  s.boundary = {{0.0, 1}, {kPi, 1}};
  return minimize(m, init_field(m, kTau, s, p), p, kTau, MinimizeOptions{});
}

}  // namespace

TEST_CASE("bad set thresholds") {
  const Mesh m = triangulate(kDisc, 0.02);
  CHECK(bad_set(m, constant_field(m, Vec2(0.6, 0.7)), EnergyParams::strong(0.1), kTau).empty());
  const double eps = 0.1;
  const VectorField u = vortex_field(m, Vec2::Zero(), 1, [&](double r) { return std::min(r / eps, 1.0); });
  const BadSet b = bad_set(m, u, EnergyParams::strong(eps), kTau);
  for (int v = 0; v < m.num_vertices(); ++v) CHECK(static_cast<bool>(b.interior[v]) == (m.vertex(v).norm() < 0.5 * eps));
  CHECK(b.boundary.empty());
  CHECK(bad_set(m, vortex_field(m, Vec2::Zero(), 1, [](double) { return 1.0; }), EnergyParams::strong(eps), kTau).count() == 0);

  // Weak mode: a unit boundary value orthogonal to g is flagged.
  VectorField w = rotating_field(m, 0.2);
  const int v0 = m.boundary_cycle()(0);
  const Vec2 g0 = kTau.g(m.boundary_param()(0));
  w.row(v0) = perp(g0).transpose();
  const BadSet bw = bad_set(m, w, EnergyParams::weak(eps, 0.5), kTau);
  CHECK(bw.boundary[0]);
  CHECK(std::count(bw.boundary.begin(), bw.boundary.end(), 1) == 1);
}

TEST_CASE("clustering") {
  const Mesh m = triangulate(kDisc, 0.02);
  const EnergyParams p = EnergyParams::strong(0.05);
  CHECK(cluster_bad_balls(bad_set(m, constant_field(m, Vec2(0.6, 0.8)), p, kTau), m, p, kTau).empty());

  const Vec2 c(0.2, -0.1);
  const VectorField u = vortex_field(m, c, 1, [&](double r) { return std::min(r / 0.05, 1.0); });
  const BadSet b = bad_set(m, u, p, kTau);
  const auto balls = cluster_bad_balls(b, m, p, kTau);
  REQUIRE(balls.size() == 1);
  CHECK(balls[0].kind == DefectKind::Interior);
  Vec2 centroid = Vec2::Zero();
  int n = 0;
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (b.interior[v]) {
      centroid += m.vertex(v);
      ++n;
    }
  }
  CHECK((balls[0].center - centroid / n).norm() < 1e-12);
  CHECK(balls[0].radius >= balls[0].extent);
}

TEST_CASE("boundary clusters are centred on the boundary") {
  const MinimizeResult r = weak_pair_minimizer();
  const Mesh m = triangulate(kDisc, 0.025);
  const EnergyParams p = EnergyParams::weak(0.1, 0.5);
  const auto balls = cluster_bad_balls(bad_set(m, r.u, p, kTau), m, p, kTau);
  REQUIRE(balls.size() == 2);
  for (const BadBall& b : balls) {
    CHECK(b.kind == DefectKind::Boundary);
    CHECK(std::abs(b.center.norm() - 1.0) < 1e-12);
  }
  CHECK((balls[0].center - balls[1].center).norm() > balls[0].radius + balls[1].radius);
}

TEST_CASE("winding on circles") {
  const Mesh m = triangulate(kDisc, 0.02);
  for (int k = -2; k <= 2; ++k) {
    const VectorField u = vortex_field(m, Vec2::Zero(), k, [](double) { return 1.0; });
    CHECK(degree_on_circle(m, u, Vec2::Zero(), 0.5) == k);
    CHECK(degree_on_circle(m, u, Vec2(0.1, 0.1), 0.3) == k);
  }
  CHECK(degree_on_circle(m, constant_field(m, Vec2(0, 1)), Vec2::Zero(), 0.5) == 0);
  const VectorField small = constant_field(m, Vec2(0.1, 0.0));
  CHECK_THROWS_AS(degree_on_circle(m, small, Vec2::Zero(), 0.5), UndefinedNormalizationError);
}

TEST_CASE("winding on vertex cycles") {
  const Mesh m = triangulate(kDisc, 0.05);
  std::vector<int> loop;
  for (int k = 0; k < m.num_boundary(); ++k) loop.push_back(m.boundary_cycle()(k));
  for (int k = -2; k <= 2; ++k) {
    CHECK(degree(m, vortex_field(m, Vec2::Zero(), k, [](double) { return 1.0; }), loop) == k);
  }
}

TEST_CASE("degree is additive over disjoint loops") {
  Rng rng(401);
  const Mesh m = triangulate(kDisc, 0.02);
  for (int trial = 0; trial < 8; ++trial) {
    const int d1 = uniform_int(rng, -2, 2), d2 = uniform_int(rng, -2, 2);
    const Vec2 a(-0.4, uniform(rng, -0.2, 0.2)), b(0.4, uniform(rng, -0.2, 0.2));
    VectorField u(m.num_vertices(), 2);
    for (int v = 0; v < m.num_vertices(); ++v) {
      const Vec2 x = m.vertex(v);
      const double ph = d1 * std::atan2(x.y() - a.y(), x.x() - a.x()) + d2 * std::atan2(x.y() - b.y(), x.x() - b.x());
      u.row(v) << std::cos(ph), std::sin(ph);
    }
    const int big = degree_on_circle(m, u, Vec2::Zero(), 0.85);
    CHECK(big == degree_on_circle(m, u, a, 0.2) + degree_on_circle(m, u, b, 0.2));
    CHECK(big == d1 + d2);
  }
}

TEST_CASE("integrality check") {
  CHECK(checked_round(1.05) == 1);
  CHECK(checked_round(-1.97) == -2);
  CHECK_THROWS_AS(checked_round(1.3), NonIntegerWindingError);
}

TEST_CASE("orientation") {
  const Vec2 g(0.6, 0.8);
  CHECK(orientation(g, g) == Orientation::Positive);
  CHECK(orientation(-g, g) == Orientation::Negative);
  CHECK_THROWS_AS(orientation(perp(g), g), IndeterminateOrientationError);
}

TEST_CASE("boundary index of a field aligned with g is zero") {
  const Mesh m = triangulate(kDisc, 0.02);
  const VectorField u = rotating_field(m, 0.1);
  for (double t : {0.0, 1.0, 4.0}) {
    const BoundaryIndexResult r = boundary_index(m, u, kTau, EnergyParams::weak(0.1, 0.5), t, 0.3, 0.5);
    CHECK(r.index == 0);
    CHECK(r.plus == Orientation::Positive);
    CHECK(r.minus == Orientation::Positive);
    CHECK(r.rho_checked);
  }
}

TEST_CASE("boundary index is independent of the radius") {
  const Mesh m = triangulate(kDisc, 0.0125);
  const EnergyParams p = EnergyParams::weak(0.05, 1.0);
  SeedSpec s;
  s.boundary = {{0.3, 1}, {0.3 + kPi, 1}};
  const VectorField u = init_field(m, kTau, s, p);
  for (double rho : {0.2, 0.3, 0.4}) {
    const BoundaryIndexResult a = boundary_index(m, u, kTau, p, 0.3, rho);
    const BoundaryIndexResult b = boundary_index(m, u, kTau, p, 0.3, 1.5 * rho);
    CHECK(a.index == 1);
    CHECK(a.index == b.index);
    // Odd index flips the orientation across the defect.
    CHECK(a.plus != a.minus);
  }
}

TEST_CASE("analysis of seeded fields") {
  SUBCASE("one interior vortex") {
    const Mesh m = triangulate(kDisc, 0.025);
    const EnergyParams p = EnergyParams::strong(0.1);
    SeedSpec s;
    s.interior = {{Vec2::Zero(), 1}};
    const AnalysisReport a = analyze(m, init_field(m, kTau, s, p), p, kTau);
    REQUIRE(a.defects.size() == 1);
    CHECK(a.defects[0].kind == DefectKind::Interior);
    CHECK(a.defects[0].charge == 1);
    CHECK(a.identity_ok);
    CHECK(a.sum_d == 1);
    CHECK(a.sum_D == 0);
    CHECK(a.defects[0].scale == doctest::Approx(4 * 0.1));
  }
  SUBCASE("degree two with four boundary defects") {
    const BoundaryData data = BoundaryData::fourier(kDisc, 2, 0.5 * kPi);
    const Mesh m = triangulate(kDisc, 0.025);
    const EnergyParams p = EnergyParams::weak(0.1, 1.0);
    SeedSpec s;
    for (int k = 0; k < 4; ++k) s.boundary.push_back({0.5 * kPi * k + 0.2, 1});
    const MinimizeResult r = minimize(m, init_field(m, data, s, p), p, data, MinimizeOptions{});
    const AnalysisReport a = analyze(m, r.u, p, data);
    CHECK(a.num_boundary() == 4);
    CHECK(a.num_interior() == 0);
    for (const DefectRecord& d : a.defects) CHECK(d.charge == 1);
    CHECK(a.identity_ok);
    CHECK(a.parity_ok);
  }
}

TEST_CASE("weak minimizer: two boundary defects, identity and parity") {
  const MinimizeResult r = weak_pair_minimizer();
  const Mesh m = triangulate(kDisc, 0.025);
  const EnergyParams p = EnergyParams::weak(0.1, 0.5);
  const AnalysisReport a = analyze(m, r.u, p, kTau);
  REQUIRE(a.defects.size() == 2);
  for (const DefectRecord& d : a.defects) {
    CHECK(d.kind == DefectKind::Boundary);
    CHECK(d.charge == 1);
    CHECK(std::abs(d.center.norm() - 1.0) <= m.h());
    CHECK(d.plus != d.minus);
  }
  CHECK(a.sum_d == 0);
  CHECK(a.sum_D == 2);
  CHECK(a.identity_ok);
  CHECK(a.parity_ok);
  const std::string csv = defects_csv(a);
  CHECK(csv.rfind("kind,center_x,center_y,scale,charge,loop_radius\n", 0) == 0);
  CHECK(csv.find("# D_declared,sum_d,sum_D,identity_ok\n# 1,0,2,true\n") != std::string::npos);
}

TEST_CASE("a missed defect fails the audit") {
  // Unit modulus vortex centred between vertices: |u| = 1 at every vertex, so
  // the bad set is empty although the field has degree one.
  const Mesh m = triangulate(kDisc, 0.05);
  const VectorField u = vortex_field(m, Vec2(0.0123, 0.0071), 1, [](double) { return 1.0; });
  CHECK_THROWS_AS(analyze(m, u, EnergyParams::strong(0.1), kTau), TopologyAuditError);
  const AnalysisReport a = analyze(m, u, EnergyParams::strong(0.1), kTau, 4.0, false);
  CHECK_FALSE(a.identity_ok);
}

TEST_CASE("eta diagnostic") {
  const Mesh m = triangulate(kDisc, 0.025);
  const EnergyParams p = EnergyParams::strong(0.1);
  CHECK_THROWS_AS(eta_diagnostic(m, constant_field(m, Vec2(1, 0)), p, kTau, Vec2::Zero(), 0.9, 0.8, 0.1), ParameterError);

  const EtaReport flat = eta_diagnostic(m, constant_field(m, Vec2(1, 0)), p, kTau, Vec2::Zero(), 0.8, 0.9, 1e-6);
  CHECK(flat.hypothesis_met);
  CHECK(flat.implication_holds);
  CHECK(flat.modulus_ok);

  SeedSpec s;
  s.interior = {{Vec2::Zero(), 1}};
  const MinimizeResult r = minimize(m, init_field(m, kTau, s, p), p, kTau, MinimizeOptions{});
  const EtaReport core = eta_diagnostic(m, r.u, p, kTau, Vec2::Zero(), 0.8, 0.9, 0.05);
  CHECK_FALSE(core.hypothesis_met);
  CHECK(core.implication_holds);

  const Vec2 far(0.0, 0.55);
  const double e = localized_energy(m, r.u, p, kTau, far, 2.0 * std::pow(0.1, 0.8)).total;
  const EtaReport quiet = eta_diagnostic(m, r.u, p, kTau, far, 0.8, 0.9, 1.01 * e / std::abs(std::log(0.1)));
  CHECK(quiet.hypothesis_met);
  CHECK(quiet.modulus_ok);
  CHECK(quiet.implication_holds);
}
