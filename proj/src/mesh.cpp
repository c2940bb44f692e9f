#include "glv/mesh.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace glv {

namespace {

struct RingMesh {
  std::vector<double> r;
  std::vector<double> theta;
  std::vector<std::array<int, 3>> tris;
  std::vector<int> outer;  // outer ring vertex ids, counterclockwise
};

// Zips consecutive rings into triangles. A ring of count 1 is a center point.
RingMesh build_rings(const std::vector<double>& radii, const std::vector<int>& counts,
                     const std::vector<double>& offsets) {
  RingMesh m;
  std::vector<int> start(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    start[k] = static_cast<int>(m.r.size());
    for (int j = 0; j < counts[k]; ++j) {
      m.r.push_back(radii[k]);
      m.theta.push_back(counts[k] == 1 ? 0.0 : offsets[k] + kTwoPi * j / counts[k]);
    }
  }
  auto add = [&](int a, int b, int c) { m.tris.push_back({a, b, c}); };
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    const int na = counts[k];
    const int nb = counts[k + 1];
    const int sa = start[k];
    const int sb = start[k + 1];
    if (na == 1) {
      for (int j = 0; j < nb; ++j) add(sa, sb + j, sb + (j + 1) % nb);
      continue;
    }
    // Walk both rings in angle; each step emits one triangle.
    auto ang_a = [&](int i) { return offsets[k] + kTwoPi * i / na; };
    auto ang_b = [&](int j) { return offsets[k + 1] + kTwoPi * j / nb; };
    // Align the starting outer vertex with inner vertex 0.
    int j0 = 0;
    double best = std::numeric_limits<double>::max();
    for (int j = 0; j < nb; ++j) {
      const double d = std::abs(wrap_angle(ang_b(j) - ang_a(0)));
      if (d < best) {
        best = d;
        j0 = j;
      }
    }
    int i = 0;
    int j = 0;
    // Angles relative to inner vertex 0, increasing along both rings.
    std::vector<double> ra(na + 1), rb(nb + 1);
    const double rb0 = wrap_angle(ang_b(j0) - ang_a(0));
    for (int ii = 0; ii <= na; ++ii) ra[ii] = kTwoPi * ii / na;
    for (int jj = 0; jj <= nb; ++jj) rb[jj] = rb0 + kTwoPi * jj / nb;
    while (i < na || j < nb) {
      const bool advance_inner =
          j == nb || (i < na && 0.5 * (ra[i] + ra[i + 1]) < 0.5 * (rb[j] + rb[j + 1]));
      const int ai = sa + i % na;
      const int bj = sb + (j0 + j) % nb;
      if (advance_inner) {
        add(ai, bj, sa + (i + 1) % na);
        ++i;
      } else {
        add(ai, bj, sb + (j0 + j + 1) % nb);
        ++j;
      }
    }
  }
  const int last = static_cast<int>(radii.size()) - 1;
  for (int j = 0; j < counts[last]; ++j) m.outer.push_back(start[last] + j);
  return m;
}

double signed_area(const Points& v, int a, int b, int c) {
  const Vec2 p = v.row(a).transpose();
  const Vec2 q = v.row(b).transpose();
  const Vec2 r = v.row(c).transpose();
  return 0.5 * cross(Vec2(q - p), Vec2(r - p));
}

Mesh assemble(const RingMesh& rm, const std::function<Vec2(double, double)>& map, double h,
              const DomainSpec* domain, bool outer_on_curve) {
  const int n = static_cast<int>(rm.r.size());
  Points v(n, 2);
  for (int i = 0; i < n; ++i) v.row(i) = map(rm.r[i], rm.theta[i]).transpose();
  Triangles t(static_cast<int>(rm.tris.size()), 3);
  for (std::size_t k = 0; k < rm.tris.size(); ++k) {
    auto [a, b, c] = rm.tris[k];
    if (signed_area(v, a, b, c) < 0) std::swap(b, c);
    t.row(static_cast<int>(k)) << a, b, c;
  }
  const int nb = static_cast<int>(rm.outer.size());
  Eigen::VectorXi cycle(nb);
  Eigen::VectorXd param(nb);
  for (int j = 0; j < nb; ++j) {
    cycle(j) = rm.outer[j];
    double th = std::fmod(rm.theta[rm.outer[j]], kTwoPi);
    if (th < 0) th += kTwoPi;
    param(j) = th;
  }
  return Mesh::build(std::move(v), std::move(t), std::move(cycle), std::move(param), h,
                     outer_on_curve ? domain : nullptr);
}

}  // namespace

Mesh Mesh::build(Points vertices, Triangles triangles, Eigen::VectorXi boundary_cycle,
                 Eigen::VectorXd boundary_param, double h, const DomainSpec* domain) {
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(triangles);
  m.boundary_cycle_ = std::move(boundary_cycle);
  m.boundary_param_ = std::move(boundary_param);
  m.h_ = h;
  if (domain != nullptr) {
    m.exact_arclength_ = true;
    m.domain_ = *domain;
  }
  m.compute_caches();
  if (m.h_ <= 0.0) {
    double s = 0.0;
    for (int e = 0; e < m.edges_.rows(); ++e) {
      s += (m.vertex(m.edges_(e, 0)) - m.vertex(m.edges_(e, 1))).norm();
    }
    m.h_ = s / std::max<Eigen::Index>(1, m.edges_.rows());
  }
  return m;
}

void Mesh::compute_caches() {
  const int nt = num_triangles();
  const int nv = num_vertices();
  area_.resize(nt);
  grad_.resize(nt, 6);
  mass_ = Eigen::VectorXd::Zero(nv);
  for (int t = 0; t < nt; ++t) {
    const Vec2 p0 = vertex(triangles_(t, 0));
    const Vec2 p1 = vertex(triangles_(t, 1));
    const Vec2 p2 = vertex(triangles_(t, 2));
    const double a2 = cross(Vec2(p1 - p0), Vec2(p2 - p0));
    area_(t) = 0.5 * a2;
    // grad phi_k = perp(opposite edge) / (2A), with the edge oriented ccw.
    const Vec2 e0 = p2 - p1;
    const Vec2 e1 = p0 - p2;
    const Vec2 e2 = p1 - p0;
    const Vec2 g0 = Vec2(e0.y(), -e0.x()) / a2;
    const Vec2 g1 = Vec2(e1.y(), -e1.x()) / a2;
    const Vec2 g2 = Vec2(e2.y(), -e2.x()) / a2;
    grad_.row(t) << -g0.x(), -g0.y(), -g1.x(), -g1.y(), -g2.x(), -g2.y();
    for (int k = 0; k < 3; ++k) mass_(triangles_(t, k)) += area_(t) / 3.0;
  }

  slot_ = Eigen::VectorXi::Constant(nv, -1);
  const int nb = num_boundary();
  for (int k = 0; k < nb; ++k) slot_(boundary_cycle_(k)) = k;
  blen_.resize(nb);
  for (int k = 0; k < nb; ++k) {
    const int a = boundary_cycle_(k);
    const int b = boundary_cycle_((k + 1) % nb);
    if (exact_arclength_) {
      double t0 = boundary_param_(k);
      double t1 = boundary_param_((k + 1) % nb);
      if (t1 <= t0) t1 += kTwoPi;
      blen_(k) = arclength(domain_, t0, t1);
    } else {
      blen_(k) = (vertex(a) - vertex(b)).norm();
    }
  }
  bweight_.resize(nb);
  for (int k = 0; k < nb; ++k) bweight_(k) = 0.5 * (blen_(k) + blen_((k + nb - 1) % nb));

  std::vector<std::pair<int, int>> e;
  e.reserve(3 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      int a = triangles_(t, k);
      int b = triangles_(t, (k + 1) % 3);
      if (a > b) std::swap(a, b);
      e.emplace_back(a, b);
    }
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  edges_.resize(static_cast<int>(e.size()), 2);
  std::vector<int> deg(nv, 0);
  for (std::size_t k = 0; k < e.size(); ++k) {
    edges_(static_cast<int>(k), 0) = e[k].first;
    edges_(static_cast<int>(k), 1) = e[k].second;
    ++deg[e[k].first];
    ++deg[e[k].second];
  }
  adj_offsets_.resize(nv + 1);
  adj_offsets_(0) = 0;
  for (int i = 0; i < nv; ++i) adj_offsets_(i + 1) = adj_offsets_(i) + deg[i];
  adj_.resize(adj_offsets_(nv));
  std::vector<int> fill(nv, 0);
  for (const auto& [a, b] : e) {
    adj_(adj_offsets_(a) + fill[a]++) = b;
    adj_(adj_offsets_(b) + fill[b]++) = a;
  }
}

EdgeList Mesh::boundary_edges() const {
  const int nb = num_boundary();
  EdgeList out(nb, 2);
  for (int k = 0; k < nb; ++k) out.row(k) << boundary_cycle_(k), boundary_cycle_((k + 1) % nb);
  return out;
}

double Mesh::max_edge_length() const {
  double m = 0.0;
  for (int e = 0; e < edges_.rows(); ++e) {
    m = std::max(m, (vertex(edges_(e, 0)) - vertex(edges_(e, 1))).norm());
  }
  return m;
}

Mesh Mesh::scaled(double factor) const {
  Mesh m = *this;
  m.vertices_ *= factor;
  m.h_ *= factor;
  m.exact_arclength_ = false;
  m.compute_caches();
  if (exact_arclength_) {
    m.blen_ = blen_ * factor;
    m.bweight_ = bweight_ * factor;
  }
  return m;
}

Mesh triangulate(const DomainSpec& spec, double h) {
  const double diam = 2.0 * spec.min_rho();
  if (!(h > 0.0) || !(h <= diam / 4.0)) {
    throw ParameterError("mesh size h must satisfy 0 < h <= diam/4");
  }
  const double hd = h / spec.max_rho();
  const int rings = static_cast<int>(std::ceil(1.0 / hd));
  std::vector<double> radii(rings + 1);
  std::vector<int> counts(rings + 1);
  std::vector<double> offsets(rings + 1, 0.0);
  radii[0] = 0.0;
  counts[0] = 1;
  for (int k = 1; k <= rings; ++k) {
    radii[k] = static_cast<double>(k) / rings;
    counts[k] = std::max(6, static_cast<int>(std::ceil(kTwoPi * radii[k] / hd)));
    // Stagger interior rings; the boundary ring starts at t = 0.
    if (k < rings && (k % 2 == 1)) offsets[k] = kPi / counts[k];
  }
  const RingMesh rm = build_rings(radii, counts, offsets);
  auto map = [&](double r, double th) -> Vec2 {
    const double rr = spec.is_disc() ? r : r * spec.rho(th);
    return {rr * std::cos(th), rr * std::sin(th)};
  };
  return assemble(rm, map, h, &spec, true);
}

Mesh triangulate_annulus(double r_inner, double r_outer, double h) {
  if (!(r_inner > 0.0) || !(r_outer > r_inner) || !(h > 0.0) ||
      !(h < (r_outer - r_inner) / 2.0)) {
    throw ParameterError("invalid annulus parameters");
  }
  const int rings = static_cast<int>(std::ceil((r_outer - r_inner) / h));
  std::vector<double> radii(rings + 1);
  std::vector<int> counts(rings + 1);
  std::vector<double> offsets(rings + 1, 0.0);
  for (int k = 0; k <= rings; ++k) {
    radii[k] = r_inner + (r_outer - r_inner) * k / rings;
    counts[k] = std::max(6, static_cast<int>(std::ceil(kTwoPi * radii[k] / h)));
    if (k % 2 == 1 && k < rings) offsets[k] = kPi / counts[k];
  }
  const RingMesh rm = build_rings(radii, counts, offsets);
  auto map = [](double r, double th) -> Vec2 { return {r * std::cos(th), r * std::sin(th)}; };
  return assemble(rm, map, h, nullptr, false);
}

void check_mesh_invariants(const Mesh& mesh, const DomainSpec& spec) {
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (!(mesh.area(t) > 0.0)) {
      throw Error("triangle " + std::to_string(t) + " has non-positive signed area");
    }
  }
  const int nb = mesh.num_boundary();
  if (nb < 3) throw Error("boundary cycle too short");
  std::vector<int> seen(mesh.num_vertices(), 0);
  for (int k = 0; k < nb; ++k) {
    if (seen[mesh.boundary_cycle()(k)]++) throw Error("boundary cycle repeats a vertex");
  }
  // Each boundary edge must be an edge of exactly one triangle, traversed
  // with the domain on its left.
  for (int k = 0; k < nb; ++k) {
    const int a = mesh.boundary_cycle()(k);
    const int b = mesh.boundary_cycle()((k + 1) % nb);
    int found = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      for (int c = 0; c < 3; ++c) {
        if (mesh.triangles()(t, c) == a && mesh.triangles()(t, (c + 1) % 3) == b) ++found;
      }
    }
    if (found != 1) throw Error("boundary edge is not positively oriented");
  }
  double winding = 0.0;
  for (int k = 0; k < nb; ++k) {
    const Vec2 p = mesh.vertex(mesh.boundary_cycle()(k));
    const Vec2 q = mesh.vertex(mesh.boundary_cycle()((k + 1) % nb));
    winding += std::atan2(cross(p, q), p.dot(q));
  }
  if (std::lround(winding / kTwoPi) != 1) throw Error("boundary cycle winding is not +1");
  for (int k = 0; k < nb; ++k) {
    const Vec2 p = mesh.vertex(mesh.boundary_cycle()(k));
    const double t = mesh.boundary_param()(k);
    if ((p - boundary_point(spec, t)).norm() > 1e-12) {
      throw Error("boundary vertex is off the boundary curve");
    }
  }
}

Points interpolate_boundary_field(const Mesh& mesh, const BoundaryData& data) {
  const int nb = mesh.num_boundary();
  Points g(nb, 2);
  for (int k = 0; k < nb; ++k) g.row(k) = data.g(mesh.boundary_param()(k)).transpose();
  return g;
}

Eigen::Matrix2d p1_jacobian(const Mesh& mesh, const VectorField& u, int tri) {
  const Vec2 u0 = u.row(mesh.triangles()(tri, 0)).transpose();
  const Vec2 u1 = u.row(mesh.triangles()(tri, 1)).transpose();
  const Vec2 u2 = u.row(mesh.triangles()(tri, 2)).transpose();
  return (u1 - u0) * mesh.shape_gradient(tri, 1).transpose() + (u2 - u0) * mesh.shape_gradient(tri, 2).transpose();
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  const Points& v = mesh.vertices();
  const Vec2 lo = v.colwise().minCoeff().transpose();
  const Vec2 hi = v.colwise().maxCoeff().transpose();
  cell_ = std::max(2.0 * mesh.h(), 1e-12);
  origin_ = lo - Vec2::Constant(cell_);
  nx_ = static_cast<int>(std::ceil((hi.x() - origin_.x()) / cell_)) + 2;
  ny_ = static_cast<int>(std::ceil((hi.y() - origin_.y()) / cell_)) + 2;
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 tlo = mesh.vertex(mesh.triangles()(t, 0));
    Vec2 thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(mesh.vertex(mesh.triangles()(t, k)));
      thi = thi.cwiseMax(mesh.vertex(mesh.triangles()(t, k)));
    }
    const int i0 = static_cast<int>((tlo.x() - origin_.x()) / cell_);
    const int i1 = static_cast<int>((thi.x() - origin_.x()) / cell_);
    const int j0 = static_cast<int>((tlo.y() - origin_.y()) / cell_);
    const int j1 = static_cast<int>((thi.y() - origin_.y()) / cell_);
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
    }
  }
}

Eigen::Vector3d MeshLocator::barycentric(int tri, const Vec2& x) const {
  const Mesh& m = *mesh_;
  const Vec2 p0 = m.vertex(m.triangles()(tri, 0));
  Eigen::Vector3d b;
  for (int k = 0; k < 3; ++k) b(k) = (k == 0 ? 1.0 : 0.0) + m.shape_gradient(tri, k).dot(x - p0);
  return b;
}

std::optional<MeshLocator::Hit> MeshLocator::locate(const Vec2& x, double max_distance) const {
  const int ci = static_cast<int>(std::floor((x.x() - origin_.x()) / cell_));
  const int cj = static_cast<int>(std::floor((x.y() - origin_.y()) / cell_));
  const int reach = 1 + static_cast<int>(std::ceil(max_distance / cell_));
  Hit best;
  best.distance = std::numeric_limits<double>::max();
  for (int ring = 0; ring <= reach; ++ring) {
    for (int i = ci - ring; i <= ci + ring; ++i) {
      for (int j = cj - ring; j <= cj + ring; ++j) {
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
        for (int t : cells_[static_cast<std::size_t>(j) * nx_ + i]) {
          const Eigen::Vector3d b = barycentric(t, x);
          if (b.minCoeff() >= -1e-12) return Hit{t, b, true, 0.0};
          // Distance from x to the triangle (closest point on its edges).
          double d = std::numeric_limits<double>::max();
          for (int k = 0; k < 3; ++k) {
            const Vec2 a = mesh_->vertex(mesh_->triangles()(t, k));
            const Vec2 c = mesh_->vertex(mesh_->triangles()(t, (k + 1) % 3));
            const Vec2 e = c - a;
            const double s = std::clamp((x - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
            d = std::min(d, (a + s * e - x).norm());
          }
          if (d < best.distance) {
            best = Hit{t, b, false, d};
          }
        }
      }
    }
    // Containment fails only outside the mesh; stop once a candidate exists
    // closer than any unvisited ring.
    if (best.triangle >= 0 && best.distance <= ring * cell_) break;
  }
  if (best.triangle < 0 || best.distance > max_distance) return std::nullopt;
  return best;
}

Vec2 MeshLocator::evaluate(const VectorField& u, const Hit& hit) const {
  Vec2 out = Vec2::Zero();
  for (int k = 0; k < 3; ++k) {
    out += hit.bary(k) * u.row(mesh_->triangles()(hit.triangle, k)).transpose();
  }
  return out;
}

VectorField transfer_field(const Mesh& from, const VectorField& u, const Mesh& to) {
  const MeshLocator loc(from);
  VectorField out(to.num_vertices(), 2);
  const double reach = 4.0 * std::max(from.h(), to.h());
  for (int i = 0; i < to.num_vertices(); ++i) {
    const auto hit = loc.locate(to.vertex(i), reach);
    if (!hit) throw ResolutionError("transfer target vertex lies outside the source mesh");
    out.row(i) = loc.evaluate(u, *hit).transpose();
  }
  return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << std::setprecision(17);
  os << "VERTICES " << mesh.num_vertices() << '\n';
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    os << mesh.vertices()(i, 0) << ' ' << mesh.vertices()(i, 1) << '\n';
  }
  os << "TRIANGLES " << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    os << mesh.triangles()(t, 0) << ' ' << mesh.triangles()(t, 1) << ' ' << mesh.triangles()(t, 2)
       << '\n';
  }
  const int nb = mesh.num_boundary();
  os << "BOUNDARY " << nb << '\n';
  for (int k = 0; k < nb; ++k) {
    os << mesh.boundary_cycle()(k) << ' ' << mesh.boundary_cycle()((k + 1) % nb) << ' '
       << mesh.boundary_param()(k) << '\n';
  }
}

namespace {
int read_section(std::istream& is, const std::string& name) {
  std::string tag;
  int n = -1;
  if (!(is >> tag >> n) || tag != name || n < 0) {
    throw Error("malformed snapshot: expected section " + name);
  }
  return n;
}
}  // namespace

Mesh read_mesh(std::istream& is, const DomainSpec& spec, double h) {
  const int nv = read_section(is, "VERTICES");
  Points v(nv, 2);
  for (int i = 0; i < nv; ++i) {
    if (!(is >> v(i, 0) >> v(i, 1))) throw Error("malformed snapshot vertex line");
  }
  const int nt = read_section(is, "TRIANGLES");
  Triangles t(nt, 3);
  for (int i = 0; i < nt; ++i) {
    if (!(is >> t(i, 0) >> t(i, 1) >> t(i, 2))) throw Error("malformed snapshot triangle line");
  }
  const int nb = read_section(is, "BOUNDARY");
  Eigen::VectorXi cycle(nb);
  Eigen::VectorXd param(nb);
  for (int k = 0; k < nb; ++k) {
    int j = 0;
    if (!(is >> cycle(k) >> j >> param(k))) throw Error("malformed snapshot boundary line");
  }
  return Mesh::build(std::move(v), std::move(t), std::move(cycle), std::move(param), h, &spec);
}

void write_field(std::ostream& os, const VectorField& u) {
  os << std::setprecision(17) << u.rows() << '\n';
  for (int i = 0; i < u.rows(); ++i) os << u(i, 0) << ' ' << u(i, 1) << '\n';
}

VectorField read_field(std::istream& is) {
  long n = -1;
  if (!(is >> n) || n < 0) throw Error("malformed field snapshot header");
  VectorField u(n, 2);
  for (long i = 0; i < n; ++i) {
    if (!(is >> u(i, 0) >> u(i, 1))) throw Error("malformed field snapshot line");
  }
  return u;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  write_mesh(os, mesh);
}

Mesh load_mesh(const std::string& path, const DomainSpec& spec) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_mesh(is, spec);
}

void save_field(const std::string& path, const VectorField& u) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  write_field(os, u);
}

VectorField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_field(is);
}

}  // namespace glv
