#include "glv/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace glv {

std::string to_string(AnchoringMode mode) {
  return mode == AnchoringMode::Strong ? "strong" : "weak";
}

double EnergyParams::boundary_scale() const {
  return is_weak() ? std::pow(epsilon, s) : epsilon;
}

void EnergyParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be > 0");
  if (is_weak() && !(s > 0.0 && s <= 1.0)) throw ParameterError("s must lie in (0, 1]");
}

double energy_density(const Eigen::Matrix2d& jacobian, const Vec2& u, double epsilon) {
  const double w = 1.0 - u.squaredNorm();
  return 0.5 * jacobian.squaredNorm() + w * w / (4.0 * epsilon * epsilon);
}

EnergyBreakdown eval_energy_gradient(const Mesh& mesh, const VectorField& u,
                                     const EnergyParams& params, const Points& g,
                                     VectorField* grad) {
  const double inv_eps2 = 1.0 / (params.epsilon * params.epsilon);
  const Triangles& tri = mesh.triangles();
  const int nt = mesh.num_triangles();
  if (grad != nullptr) grad->setZero(u.rows(), 2);

  double dir = 0.0;
  double pot = 0.0;
  for (int t = 0; t < nt; ++t) {
    const int a = tri(t, 0);
    const int b = tri(t, 1);
    const int c = tri(t, 2);
    const Vec2 ua = u.row(a).transpose();
    const Vec2 ub = u.row(b).transpose();
    const Vec2 uc = u.row(c).transpose();
    const Vec2 gb = mesh.shape_gradient(t, 1);
    const Vec2 gc = mesh.shape_gradient(t, 2);
    const Vec2 ga = -(gb + gc);
    const double area = mesh.area(t);
    // Differences keep constant fields exactly gradient free.
    const Eigen::Matrix2d J = (ub - ua) * gb.transpose() + (uc - ua) * gc.transpose();
    dir += 0.5 * area * J.squaredNorm();

    const Vec2 mab = 0.5 * (ua + ub);
    const Vec2 mbc = 0.5 * (ub + uc);
    const Vec2 mca = 0.5 * (uc + ua);
    const double wab = 1.0 - mab.squaredNorm();
    const double wbc = 1.0 - mbc.squaredNorm();
    const double wca = 1.0 - mca.squaredNorm();
    pot += area / 3.0 * (wab * wab + wbc * wbc + wca * wca);

    if (grad != nullptr) {
      const double q = -area / 3.0 * inv_eps2 * 0.5;  // d/du_m split between endpoints
      const Vec2 fab = q * wab * mab;
      const Vec2 fbc = q * wbc * mbc;
      const Vec2 fca = q * wca * mca;
      grad->row(a) += (area * J * ga + fab + fca).transpose();
      grad->row(b) += (area * J * gb + fab + fbc).transpose();
      grad->row(c) += (area * J * gc + fbc + fca).transpose();
    }
  }
  pot *= 0.25 * inv_eps2;

  double pen = 0.0;
  const Eigen::VectorXi& cycle = mesh.boundary_cycle();
  const Eigen::VectorXd& w = mesh.boundary_weight();
  if (params.is_weak()) {
    const double inv_eps_s = 1.0 / std::pow(params.epsilon, params.s);
    for (int k = 0; k < mesh.num_boundary(); ++k) {
      const Vec2 gp = perp(g.row(k).transpose());
      const double p = u.row(cycle(k)).dot(gp.transpose());
      pen += 0.5 * inv_eps_s * w(k) * p * p;
      if (grad != nullptr) grad->row(cycle(k)) += (inv_eps_s * w(k) * p * gp).transpose();
    }
  } else if (grad != nullptr) {
    for (int k = 0; k < mesh.num_boundary(); ++k) {
      const Vec2 gk = g.row(k).transpose();
      const double p = grad->row(cycle(k)).dot(gk.transpose());
      grad->row(cycle(k)) = p * gk.transpose();
    }
  }
  return {dir, pot, pen, dir + pot + pen};
}

EnergyBreakdown eval_energy(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                            const BoundaryData& data) {
  return eval_energy_gradient(mesh, u, params, interpolate_boundary_field(mesh, data), nullptr);
}

VectorField eval_gradient(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                          const BoundaryData& data) {
  VectorField grad;
  eval_energy_gradient(mesh, u, params, interpolate_boundary_field(mesh, data), &grad);
  return grad;
}

double dual_norm(const Mesh& mesh, const VectorField& grad, const VectorField& u,
                 bool interior_only) {
  const Eigen::VectorXd& m = mesh.lumped_mass();
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    den += m(i) * u.row(i).squaredNorm();
    if (interior_only && mesh.boundary_slot(i) >= 0) continue;
    num += grad.row(i).squaredNorm() / m(i);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double el_residual(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                   const BoundaryData& data, bool interior_only) {
  return dual_norm(mesh, eval_gradient(mesh, u, params, data), u, interior_only);
}

namespace {

// Calls f(point, weight, triangle) for quadrature points of omega_r(x0)
// restricted to triangle t, using the three edge midpoints of each
// sub-triangle. Whole triangles inside the ball use the midpoints directly.
template <typename F>
void integrate_cut_triangle(const Mesh& mesh, int t, const Vec2& x0, double r, F&& f) {
  const Vec2 p0 = mesh.vertex(mesh.triangles()(t, 0));
  const Vec2 p1 = mesh.vertex(mesh.triangles()(t, 1));
  const Vec2 p2 = mesh.vertex(mesh.triangles()(t, 2));
  const double r2 = r * r;
  const bool in0 = (p0 - x0).squaredNorm() < r2;
  const bool in1 = (p1 - x0).squaredNorm() < r2;
  const bool in2 = (p2 - x0).squaredNorm() < r2;
  const double area = mesh.area(t);
  if (in0 && in1 && in2) {
    f(Vec2(0.5 * (p0 + p1)), area / 3.0);
    f(Vec2(0.5 * (p1 + p2)), area / 3.0);
    f(Vec2(0.5 * (p2 + p0)), area / 3.0);
    return;
  }
  // Distance from x0 to the triangle; skip triangles clear of the ball.
  auto seg = [&](const Vec2& a, const Vec2& b) {
    const Vec2 e = b - a;
    const double s = std::clamp((x0 - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    return (a + s * e - x0).norm();
  };
  const Vec2 bc = Vec2(mesh.shape_gradient(t, 1).dot(x0 - p0), mesh.shape_gradient(t, 2).dot(x0 - p0));
  const bool contains_center = bc.x() >= 0 && bc.y() >= 0 && bc.x() + bc.y() <= 1;
  if (!contains_center && std::min({seg(p0, p1), seg(p1, p2), seg(p2, p0)}) >= r) return;
  constexpr int n = 16;  // sub-triangles per edge
  const double sub = area / (n * n);
  const Vec2 e1 = (p1 - p0) / n;
  const Vec2 e2 = (p2 - p0) / n;
  auto emit = [&](const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 cen = (a + b + c) / 3.0;
    if ((cen - x0).squaredNorm() >= r2) return;
    f(Vec2(0.5 * (a + b)), sub / 3.0);
    f(Vec2(0.5 * (b + c)), sub / 3.0);
    f(Vec2(0.5 * (c + a)), sub / 3.0);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; i + j < n; ++j) {
      const Vec2 a = p0 + i * e1 + j * e2;
      emit(a, a + e1, a + e2);
      if (i + j + 1 < n) emit(Vec2(a + e1), Vec2(a + e1 + e2), Vec2(a + e2));
    }
  }
}

Vec2 p1_value(const Mesh& mesh, const VectorField& u, int t, const Vec2& x) {
  const Vec2 p0 = mesh.vertex(mesh.triangles()(t, 0));
  const double b1 = mesh.shape_gradient(t, 1).dot(x - p0);
  const double b2 = mesh.shape_gradient(t, 2).dot(x - p0);
  return (1.0 - b1 - b2) * u.row(mesh.triangles()(t, 0)).transpose() +
         b1 * u.row(mesh.triangles()(t, 1)).transpose() +
         b2 * u.row(mesh.triangles()(t, 2)).transpose();
}

// Triangle owning each boundary edge, in cycle order.
std::vector<int> boundary_edge_triangles(const Mesh& mesh) {
  const int nb = mesh.num_boundary();
  std::unordered_map<long long, int> key;
  key.reserve(static_cast<std::size_t>(2 * nb));
  const auto& cyc = mesh.boundary_cycle();
  auto code = [](int a, int b) { return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b); };
  for (int k = 0; k < nb; ++k) key[code(cyc(k), cyc((k + 1) % nb))] = k;
  std::vector<int> owner(nb, -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int c = 0; c < 3; ++c) {
      auto it = key.find(code(mesh.triangles()(t, c), mesh.triangles()(t, (c + 1) % 3)));
      if (it != key.end()) owner[it->second] = t;
    }
  }
  return owner;
}

}  // namespace

EnergyBreakdown localized_energy(const Mesh& mesh, const VectorField& u,
                                 const EnergyParams& params, const BoundaryData& data,
                                 const Vec2& x0, double r) {
  EnergyBreakdown e;
  const double inv4eps2 = 0.25 / (params.epsilon * params.epsilon);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::Matrix2d J = p1_jacobian(mesh, u, t);
    const double dens = 0.5 * J.squaredNorm();
    integrate_cut_triangle(mesh, t, x0, r, [&](const Vec2& x, double w) {
      const double m = 1.0 - p1_value(mesh, u, t, x).squaredNorm();
      e.dirichlet += w * dens;
      e.potential += w * inv4eps2 * m * m;
    });
  }
  if (params.is_weak()) {
    const double inv_eps_s = 1.0 / std::pow(params.epsilon, params.s);
    const Points g = interpolate_boundary_field(mesh, data);
    for (int k = 0; k < mesh.num_boundary(); ++k) {
      const int v = mesh.boundary_cycle()(k);
      if ((mesh.vertex(v) - x0).norm() >= r) continue;
      const double p = u.row(v).dot(perp(g.row(k).transpose()).transpose());
      e.penalty += 0.5 * inv_eps_s * mesh.boundary_weight()(k) * p * p;
    }
  }
  e.total = e.dirichlet + e.potential + e.penalty;
  return e;
}

PohozaevTerms pohozaev_terms(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                             const Vec2& x0, double r, const PsiField& psi) {
  if (!(r > 0.0)) throw ResolutionError("Pohozaev radius must be positive");
  const double eps = params.epsilon;
  PohozaevTerms out;

  // Volume side. Translations give zero; for psi = x - x2 it reduces to the
  // integral of (1 - |u|^2)^2 / (2 eps^2).
  bool any = false;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    integrate_cut_triangle(mesh, t, x0, r, [&](const Vec2& x, double w) {
      any = true;
      if (psi.kind == PsiField::Kind::Translation) return;
      const double m = 1.0 - p1_value(mesh, u, t, x).squaredNorm();
      out.bulk += w * m * m / (2.0 * eps * eps);
    });
  }
  if (!any) throw ResolutionError("omega_r contains no quadrature point of the mesh");

  auto flux = [&](const Vec2& x, const Vec2& n, int t) {
    const Eigen::Matrix2d J = p1_jacobian(mesh, u, t);
    const Vec2 v = p1_value(mesh, u, t, x);
    const Vec2 ps = psi(x);
    return energy_density(J, v, eps) * ps.dot(n) - (J * n).dot(J * ps);
  };

  // Circular arc inside the mesh.
  const MeshLocator loc(mesh);
  const double ds = 0.5 * mesh.h();
  const int nseg = std::max(16, static_cast<int>(std::ceil(kTwoPi * r / ds)));
  const double dphi = kTwoPi / nseg;
  for (int k = 0; k < nseg; ++k) {
    const double phi = (k + 0.5) * dphi;
    const Vec2 n(std::cos(phi), std::sin(phi));
    const Vec2 x = x0 + r * n;
    const auto hit = loc.locate(x, 0.0);
    if (!hit || !hit->inside) continue;
    out.boundary += flux(x, n, hit->triangle) * r * dphi;
  }

  // Polygonal boundary inside the ball.
  const std::vector<int> owner = boundary_edge_triangles(mesh);
  const int nb = mesh.num_boundary();
  for (int k = 0; k < nb; ++k) {
    const Vec2 a = mesh.vertex(mesh.boundary_cycle()(k));
    const Vec2 b = mesh.vertex(mesh.boundary_cycle()((k + 1) % nb));
    const Vec2 e = b - a;
    const double len = e.norm();
    const Vec2 n = Vec2(e.y(), -e.x()) / len;
    const int m = std::max(1, static_cast<int>(std::ceil(len / ds)));
    for (int j = 0; j < m; ++j) {
      const Vec2 x = a + (j + 0.5) / m * e;
      if ((x - x0).norm() >= r) continue;
      out.boundary += flux(x, n, owner[k]) * len / m;
    }
  }
  out.residual = std::abs(out.boundary - out.bulk);
  return out;
}

double pohozaev_residual(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                         const Vec2& x0, double r, const PsiField& psi) {
  return pohozaev_terms(mesh, u, params, x0, r, psi).residual;
}

std::vector<RadialSample> radial_profile(const Mesh& mesh, const VectorField& u,
                                         const EnergyParams& params, const BoundaryData& data,
                                         const Vec2& x0, const std::vector<double>& radii) {
  const MeshLocator loc(mesh);
  const DomainSpec& spec = data.domain;
  const bool on_boundary = distance_to_boundary(spec, x0) < 1e-9;
  std::vector<RadialSample> out;
  for (double r : radii) {
    if (!(r > 0.0)) throw ResolutionError("radial_profile radius must be positive");
    const int nseg = std::max(16, static_cast<int>(std::ceil(kTwoPi * r / (0.5 * mesh.h()))));
    const double dphi = kTwoPi / nseg;
    double integral = 0.0;
    int inside = 0;
    for (int k = 0; k < nseg; ++k) {
      const double phi = (k + 0.5) * dphi;
      const Vec2 x = x0 + r * Vec2(std::cos(phi), std::sin(phi));
      const auto hit = loc.locate(x, 0.0);
      if (!hit || !hit->inside) continue;
      ++inside;
      const Eigen::Matrix2d J = p1_jacobian(mesh, u, hit->triangle);
      integral += energy_density(J, loc.evaluate(u, *hit), params.epsilon) * r * dphi;
    }
    if (inside == 0) throw ResolutionError("arc lies outside the mesh");
    RadialSample rs{r, r * integral, r * integral};
    if (on_boundary && params.is_weak()) {
      const double t0 = project_to_boundary(spec, x0);
      const BoundaryCrossings cr = circle_boundary_crossings(spec, t0, r);
      double sum = 0.0;
      for (double t : {cr.t_plus, cr.t_minus}) {
        const auto hit = loc.locate(boundary_point(spec, t), 4.0 * mesh.h());
        if (!hit) throw ResolutionError("arc endpoint lies outside the mesh");
        const double p = loc.evaluate(u, *hit).dot(data.g_perp(t));
        sum += p * p;
      }
      rs.F_gamma += r / (2.0 * std::pow(params.epsilon, params.s)) * sum;
    }
    out.push_back(rs);
  }
  return out;
}

std::string energy_csv_header() { return "epsilon,s,mode,dirichlet,potential,penalty,total"; }

std::string energy_csv_row(const EnergyParams& params, const EnergyBreakdown& e) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g", params.epsilon,
                params.s, to_string(params.mode).c_str(), e.dirichlet, e.potential, e.penalty,
                e.total);
  return buf;
}

}  // namespace glv
