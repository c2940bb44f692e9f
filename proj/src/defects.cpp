#include "glv/defects.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace glv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int BadSet::count() const {
  return static_cast<int>(std::count(interior.begin(), interior.end(), 1) +
                          std::count(boundary.begin(), boundary.end(), 1));
}

BadSet bad_set(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
               const BoundaryData& data) {
  BadSet b;
  b.interior.resize(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) b.interior[v] = u.row(v).norm() < 0.5 ? 1 : 0;
  if (params.is_weak()) {
    const Points g = interpolate_boundary_field(mesh, data);
    b.boundary.resize(mesh.num_boundary());
    for (int k = 0; k < mesh.num_boundary(); ++k) {
      const Vec2 gp = perp(g.row(k).transpose());
      b.boundary[k] = std::abs(u.row(mesh.boundary_cycle()(k)).dot(gp.transpose())) > 0.25;
    }
  }
  return b;
}

std::string to_string(DefectKind kind) {
  return kind == DefectKind::Interior ? "interior" : "boundary";
}

std::string to_string(Orientation o) { return o == Orientation::Positive ? "positive" : "negative"; }

namespace {

struct Cluster {
  std::vector<int> vertices;
  Vec2 centroid = Vec2::Zero();
  double extent = 0.0;
  int merges = 1;
  bool boundary = false;
  double t = 0.0;

  void update(const Mesh& mesh) {
    centroid.setZero();
    for (int v : vertices) centroid += mesh.vertex(v);
    centroid /= static_cast<double>(vertices.size());
    extent = 0.0;
    for (int v : vertices) extent = std::max(extent, (mesh.vertex(v) - centroid).norm());
  }
};

double extent_about(const Mesh& mesh, const std::vector<int>& vs, const Vec2& c) {
  double e = 0.0;
  for (int v : vs) e = std::max(e, (mesh.vertex(v) - c).norm());
  return e;
}

double min_distance(const Mesh& mesh, const Cluster& a, const Cluster& b) {
  double d = kInf;
  for (int i : a.vertices) {
    for (int j : b.vertices) d = std::min(d, (mesh.vertex(i) - mesh.vertex(j)).norm());
  }
  return d;
}

}  // namespace

std::vector<BadBall> cluster_bad_balls(const BadSet& bad, const Mesh& mesh,
                                       const EnergyParams& params, const BoundaryData& data,
                                       double lambda, int max_merges) {
  if (!(lambda > 1.0)) throw ParameterError("lambda must exceed 1");
  const int n = mesh.num_vertices();
  std::vector<char> flag(n, 0);
  for (int v = 0; v < n && v < static_cast<int>(bad.interior.size()); ++v) flag[v] = bad.interior[v];
  for (std::size_t k = 0; k < bad.boundary.size(); ++k) {
    if (bad.boundary[k]) flag[mesh.boundary_cycle()(static_cast<int>(k))] = 1;
  }

  // Connected components of the flagged vertices.
  std::vector<Cluster> clusters;
  std::vector<char> seen(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!flag[v] || seen[v]) continue;
    Cluster c;
    std::vector<int> stack{v};
    seen[v] = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      c.vertices.push_back(a);
      for (int k = mesh.adjacency_offsets()(a); k < mesh.adjacency_offsets()(a + 1); ++k) {
        const int b = mesh.adjacency()(k);
        if (flag[b] && !seen[b]) {
          seen[b] = 1;
          stack.push_back(b);
        }
      }
    }
    c.update(mesh);
    clusters.push_back(std::move(c));
  }

  // A cluster is interior when its covering disc stays clear of the
  // boundary and it holds no boundary vertex; otherwise it is centered at
  // the projection of its centroid onto the boundary.
  const DomainSpec& spec = data.domain;
  const double h = mesh.h();
  const double margin = 0.5 * h;
  auto classify = [&](Cluster& c) {
    c.update(mesh);
    bool touches = false;
    for (int v : c.vertices) touches = touches || mesh.boundary_slot(v) >= 0;
    c.boundary = touches || !contains(spec, c.centroid) ||
                 distance_to_boundary(spec, c.centroid) <= c.extent + h;
    if (c.boundary) {
      c.t = project_to_boundary(spec, c.centroid);
      c.centroid = boundary_point(spec, c.t);
      c.extent = extent_about(mesh, c.vertices, c.centroid);
    }
  };
  for (Cluster& c : clusters) classify(c);

  // Merge clusters whose covering discs overlap or that nearly touch.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < clusters.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        const double d = (clusters[i].centroid - clusters[j].centroid).norm();
        if (clusters[i].extent + clusters[j].extent + 2.0 * margin >= d ||
            min_distance(mesh, clusters[i], clusters[j]) <= 2.0 * h) {
          clusters[i].vertices.insert(clusters[i].vertices.end(), clusters[j].vertices.begin(),
                                      clusters[j].vertices.end());
          clusters[i].merges += clusters[j].merges;
          classify(clusters[i]);
          clusters.erase(clusters.begin() + static_cast<long>(j));
          merged = true;
        }
      }
    }
  }

  const double eps = params.epsilon;
  const double bscale = params.boundary_scale();
  std::vector<BadBall> balls;
  for (const Cluster& c : clusters) {
    BadBall b;
    b.vertices = c.vertices;
    b.center = c.centroid;
    b.extent = c.extent;
    double sep = kInf;
    b.clearance = kInf;
    for (const Cluster& o : clusters) {
      if (&o == &c) continue;
      sep = std::min(sep, (o.centroid - c.centroid).norm() - o.extent - margin);
      for (int v : o.vertices) b.clearance = std::min(b.clearance, (mesh.vertex(v) - c.centroid).norm());
    }
    b.separation = sep;
    if (c.boundary) {
      b.kind = DefectKind::Boundary;
      b.t = c.t;
      b.scale = bscale;
      b.radius = std::max(c.extent + margin,
                          std::min({lambda * bscale, 0.5 * sep, spec.min_rho()}));
    } else {
      b.kind = DefectKind::Interior;
      b.scale = eps;
      b.radius = std::max(c.extent + margin,
                          std::min({lambda * eps, 0.5 * sep,
                                    distance_to_boundary(spec, c.centroid) - margin}));
    }
    if (b.extent > 8.0 * lambda * b.scale * max_merges) {
      throw ClusteringOverflowError("bad-set cluster of extent " + std::to_string(b.extent) +
                                    " exceeds the covering bound");
    }
    balls.push_back(std::move(b));
  }
  return balls;
}

int checked_round(double winding) {
  const double r = std::round(winding);
  if (std::abs(winding - r) > 0.1) {
    throw NonIntegerWindingError("winding " + std::to_string(winding) + " is not near an integer");
  }
  return static_cast<int>(r);
}

int degree(const Mesh& mesh, const VectorField& u, const std::vector<int>& loop) {
  if (loop.size() < 3) throw ParameterError("loop needs at least three vertices");
  double total = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Vec2 a = u.row(loop[k]).transpose();
    const Vec2 b = u.row(loop[(k + 1) % loop.size()]).transpose();
    if (a.norm() < 0.25) throw UndefinedNormalizationError("|u| < 1/4 on the loop");
    total += std::atan2(cross(a, b), a.dot(b));
  }
  (void)mesh;
  return checked_round(total / kTwoPi);
}

int degree_on_circle(const Mesh& mesh, const VectorField& u, const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw ParameterError("loop radius must be positive");
  const MeshLocator loc(mesh);
  const int n = std::max(16, static_cast<int>(std::ceil(kTwoPi * radius / (0.5 * mesh.h()))));
  std::vector<Vec2> vals(n);
  for (int k = 0; k < n; ++k) {
    const double phi = kTwoPi * k / n;
    const Vec2 x = center + radius * Vec2(std::cos(phi), std::sin(phi));
    const auto hit = loc.locate(x, 2.0 * mesh.h());
    if (!hit) throw ResolutionError("winding loop leaves the mesh");
    vals[k] = loc.evaluate(u, *hit);
    if (vals[k].norm() < 0.25) throw UndefinedNormalizationError("|u| < 1/4 on the loop");
  }
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec2& a = vals[k];
    const Vec2& b = vals[(k + 1) % n];
    total += std::atan2(cross(a, b), a.dot(b));
  }
  return checked_round(total / kTwoPi);
}

Orientation orientation(const Vec2& u_value, const Vec2& g_value) {
  const double p = u_value.dot(g_value);
  if (p > 0.0) return Orientation::Positive;
  if (p < 0.0) return Orientation::Negative;
  throw IndeterminateOrientationError("u is orthogonal to g");
}

namespace {

BoundaryIndexResult boundary_index_once(const MeshLocator& loc, const VectorField& u,
                                        const BoundaryData& data, const EnergyParams& params,
                                        double t_q, double rho) {
  const Mesh& mesh = loc.mesh();
  const DomainSpec& spec = data.domain;
  const BoundaryCrossings cr = circle_boundary_crossings(spec, t_q, rho);
  const Vec2 q = boundary_point(spec, t_q);
  const Vec2 qp = boundary_point(spec, cr.t_plus);
  const Vec2 qm = boundary_point(spec, cr.t_minus);
  const double phi_p = std::atan2(qp.y() - q.y(), qp.x() - q.x());
  double sweep = std::atan2(qm.y() - q.y(), qm.x() - q.x()) - phi_p;
  while (sweep <= 0.0) sweep += kTwoPi;
  while (sweep > kTwoPi) sweep -= kTwoPi;

  const double reach = 4.0 * mesh.h();
  auto value_at = [&](const Vec2& x) {
    const auto hit = loc.locate(x, reach);
    if (!hit) throw ResolutionError("index contour leaves the mesh");
    return loc.evaluate(u, *hit);
  };
  const int n = std::max(8, static_cast<int>(std::ceil(sweep * rho / (0.5 * mesh.h()))));
  double arc = 0.0;
  Vec2 prev = value_at(qp);
  const Vec2 first = prev;
  for (int k = 0; k <= n; ++k) {
    const Vec2 cur =
        k == n ? value_at(qm)
               : value_at(Vec2(q + rho * Vec2(std::cos(phi_p + sweep * k / n),
                                               std::sin(phi_p + sweep * k / n))));
    if (cur.norm() < 0.5) throw UndefinedNormalizationError("|u| < 1/2 on the index arc");
    // Increment of arg w = 2 arg u.
    arc += wrap_angle(2.0 * std::atan2(cross(prev, cur), prev.dot(cur)));
    prev = cur;
  }
  const Vec2 last = prev;
  if (params.is_weak()) {
    for (auto [val, t] : {std::pair{first, cr.t_plus}, std::pair{last, cr.t_minus}}) {
      if (std::abs(val.dot(data.g_perp(t))) > 0.25) {
        throw UndefinedNormalizationError("|<u, g_perp>| > 1/4 at an index contour crossing");
      }
    }
  }
  const double gp = data.phase(cr.t_plus);
  const double gm = data.phase(cr.t_minus);
  const double dplus = wrap_angle(2.0 * std::atan2(first.y(), first.x()) - 2.0 * gp);
  const double dminus = wrap_angle(2.0 * std::atan2(last.y(), last.x()) - 2.0 * gm);
  BoundaryIndexResult r;
  r.winding = (arc - dminus + 2.0 * (gp - gm) + dplus) / kTwoPi;
  r.index = checked_round(r.winding);
  r.t_plus = cr.t_plus;
  r.t_minus = cr.t_minus;
  r.plus = orientation(first, data.g(cr.t_plus));
  r.minus = orientation(last, data.g(cr.t_minus));
  return r;
}

}  // namespace

BoundaryIndexResult boundary_index(const Mesh& mesh, const VectorField& u,
                                   const BoundaryData& data, const EnergyParams& params,
                                   double t_q, double rho, double max_rho) {
  if (!(rho > 0.0)) throw ParameterError("index radius must be positive");
  const MeshLocator loc(mesh);
  BoundaryIndexResult r = boundary_index_once(loc, u, data, params, t_q, rho);
  if (1.5 * rho <= max_rho) {
    BoundaryIndexResult big;
    bool admissible = true;
    try {
      big = boundary_index_once(loc, u, data, params, t_q, 1.5 * rho);
    } catch (const TopologyError&) {
      admissible = false;
    } catch (const ResolutionError&) {
      admissible = false;
    }
    if (admissible) {
      if (big.index != r.index) {
        throw InconsistentIndexError("boundary index " + std::to_string(r.index) + " at rho but " +
                                     std::to_string(big.index) + " at 1.5 rho");
      }
      r.rho_checked = true;
    }
  }
  return r;
}

int AnalysisReport::num_interior() const {
  return static_cast<int>(std::count_if(defects.begin(), defects.end(), [](const DefectRecord& d) {
    return d.kind == DefectKind::Interior;
  }));
}

int AnalysisReport::num_boundary() const {
  return static_cast<int>(defects.size()) - num_interior();
}

namespace {

// Candidate loop radii: the preferred value first, then outward and inward
// in steps of h within [lo, hi].
std::vector<double> loop_radii(double preferred, double lo, double hi, double h) {
  std::vector<double> out;
  if (lo > hi) {
    out.push_back(lo);
    return out;
  }
  const double p = std::clamp(preferred, lo, hi);
  out.push_back(p);
  for (double r = p + h; r <= hi; r += h) out.push_back(r);
  for (double r = p - h; r >= lo; r -= h) out.push_back(r);
  return out;
}

template <typename F>
auto first_admissible(const std::vector<double>& radii, F&& f) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    try {
      return f(radii[i]);
    } catch (const UndefinedNormalizationError&) {
      if (i + 1 == radii.size()) throw;
    } catch (const NonIntegerWindingError&) {
      if (i + 1 == radii.size()) throw;
    } catch (const ResolutionError&) {
      if (i + 1 == radii.size()) throw;
    }
  }
  throw ResolutionError("no admissible loop radius");
}

}  // namespace

AnalysisReport analyze(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                       const BoundaryData& data, double lambda, bool audit) {
  params.validate();
  AnalysisReport rep;
  rep.declared_degree = data.declared_degree;
  const std::vector<BadBall> balls =
      cluster_bad_balls(bad_set(mesh, u, params, data), mesh, params, data, lambda);
  const DomainSpec& spec = data.domain;
  const double h = mesh.h();

  for (const BadBall& b : balls) {
    DefectRecord d;
    d.kind = b.kind;
    d.center = b.center;
    d.scale = lambda * b.scale;
    d.ball_radius = b.radius;
    d.t = b.t;
    const double lo = b.extent + 2.0 * h;
    if (b.kind == DefectKind::Interior) {
      const double hi = std::min(b.clearance - h, distance_to_boundary(spec, b.center) - h);
      auto res = first_admissible(loop_radii(2.0 * b.radius, lo, hi, h), [&](double rho) {
        return std::pair{degree_on_circle(mesh, u, b.center, rho), rho};
      });
      d.charge = res.first;
      d.loop_radius = res.second;
      rep.sum_d += d.charge;
    } else {
      const double hi = std::min(b.clearance - h, spec.min_rho());
      auto res = first_admissible(loop_radii(2.0 * b.radius, lo, hi, h), [&](double rho) {
        return std::pair{boundary_index(mesh, u, data, params, b.t, rho, hi), rho};
      });
      d.charge = res.first.index;
      d.loop_radius = res.second;
      d.plus = res.first.plus;
      d.minus = res.first.minus;
      const bool flips = d.plus != d.minus;
      if (flips != (std::abs(d.charge) % 2 == 1)) rep.parity_ok = false;
      rep.sum_D += d.charge;
    }
    rep.defects.push_back(d);
  }
  rep.identity_ok = 2 * rep.declared_degree == 2 * rep.sum_d + rep.sum_D;
  if (audit && !rep.identity_ok) {
    throw TopologyAuditError("degree identity fails: 2*" + std::to_string(rep.declared_degree) +
                             " != 2*" + std::to_string(rep.sum_d) + " + " +
                             std::to_string(rep.sum_D));
  }

  // Local identity on boundary-centered super-balls that enclose further
  // defects while staying clear of the rest.
  for (std::size_t i = 0; i < rep.defects.size(); ++i) {
    const DefectRecord& c = rep.defects[i];
    if (c.kind != DefectKind::Boundary) continue;
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t j = 0; j < rep.defects.size(); ++j) {
      if (j != i) order.emplace_back((rep.defects[j].center - c.center).norm(), j);
    }
    std::sort(order.begin(), order.end());
    for (std::size_t m = 0; m < order.size(); ++m) {
      double R = 0.0;
      for (std::size_t k = 0; k <= m; ++k) {
        R = std::max(R, order[k].first + balls[order[k].second].extent + 2.0 * h);
      }
      R = std::max(R, balls[i].extent + 2.0 * h);
      const double next =
          m + 1 < order.size() ? order[m + 1].first - balls[order[m + 1].second].extent - h : kInf;
      if (R >= next || R >= spec.min_rho()) break;
      int expected = c.charge;
      for (std::size_t k = 0; k <= m; ++k) {
        const DefectRecord& o = rep.defects[order[k].second];
        expected += o.kind == DefectKind::Boundary ? o.charge : 2 * o.charge;
      }
      int measured = 0;
      try {
        measured = boundary_index(mesh, u, data, params, c.t, R).index;
      } catch (const TopologyError&) {
        continue;
      } catch (const ResolutionError&) {
        continue;
      }
      ++rep.local_checks;
      if (audit && measured != expected) {
        throw TopologyAuditError("local identity fails: super-ball index " +
                                 std::to_string(measured) + " != " + std::to_string(expected));
      }
    }
  }
  return rep;
}

std::string defects_csv(const AnalysisReport& report) {
  std::ostringstream os;
  os << "kind,center_x,center_y,scale,charge,loop_radius\n";
  char buf[256];
  for (const DefectRecord& d : report.defects) {
    std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%d,%.10g\n", to_string(d.kind).c_str(),
                  d.center.x(), d.center.y(), d.scale, d.charge, d.loop_radius);
    os << buf;
  }
  os << "# D_declared,sum_d,sum_D,identity_ok\n";
  os << "# " << report.declared_degree << ',' << report.sum_d << ',' << report.sum_D << ','
     << (report.identity_ok ? "true" : "false") << '\n';
  return os.str();
}

EtaReport eta_diagnostic(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                         const BoundaryData& data, const Vec2& x0, double beta, double gamma,
                         double eta) {
  params.validate();
  const double top = params.is_weak() ? params.s : 1.0;
  if (!(0.75 * top <= beta && beta < gamma && gamma < top)) {
    throw ParameterError(params.is_weak() ? "eta diagnostic requires 3s/4 <= beta < gamma < s"
                                          : "eta diagnostic requires 3/4 <= beta < gamma < 1");
  }
  if (!(eta > 0.0)) throw ParameterError("eta must be positive");
  if (!(params.epsilon < 1.0)) throw ParameterError("eta diagnostic requires eps < 1");
  const double eps = params.epsilon;
  EtaReport r;
  r.radius_energy = 2.0 * std::pow(eps, beta);
  r.radius_check = std::pow(eps, gamma);
  r.local_energy = localized_energy(mesh, u, params, data, x0, r.radius_energy).total;
  r.threshold = eta * std::abs(std::log(eps));
  r.hypothesis_met = r.local_energy <= r.threshold;
  r.min_modulus = kInf;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if ((mesh.vertex(v) - x0).norm() <= r.radius_check) {
      r.min_modulus = std::min(r.min_modulus, u.row(v).norm());
    }
  }
  r.modulus_ok = r.min_modulus >= 0.5;
  if (params.is_weak()) {
    for (int k = 0; k < mesh.num_boundary(); ++k) {
      const int v = mesh.boundary_cycle()(k);
      if ((mesh.vertex(v) - x0).norm() > r.radius_check) continue;
      const double p = std::abs(u.row(v).dot(data.g_perp(mesh.boundary_param()(k)).transpose()));
      r.max_perp = std::max(r.max_perp, p);
    }
    r.anchoring_ok = r.max_perp <= 0.25;
  }
  r.implication_holds = !r.hypothesis_met || (r.modulus_ok && r.anchoring_ok);
  return r;
}

}  // namespace glv
