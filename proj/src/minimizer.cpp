#include "glv/minimizer.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <random>

namespace glv {

std::string to_string(StepRule rule) {
  switch (rule) {
    case StepRule::BarzilaiBorwein:
      return "barzilai-borwein";
    case StepRule::Fixed:
      return "fixed";
    case StepRule::Backtracking:
      return "backtracking";
  }
  return "";
}

StepRule step_rule_from_string(const std::string& name) {
  if (name == "barzilai-borwein") return StepRule::BarzilaiBorwein;
  if (name == "fixed") return StepRule::Fixed;
  if (name == "backtracking") return StepRule::Backtracking;
  throw ParameterError("unknown step rule '" + name + "'");
}

void MinimizeOptions::validate() const {
  if (max_iters < 0) throw ParameterError("max_iters must be >= 0");
  if (!(initial_step > 0.0)) throw ParameterError("initial_step must be > 0");
  if (memory < 1) throw ParameterError("memory must be >= 1");
  for (std::size_t i = 1; i < continuation.size(); ++i) {
    if (!(continuation[i] < continuation[i - 1])) {
      throw ParameterError("continuation schedule must be strictly decreasing");
    }
  }
}

double MinimizeOptions::tolerance_for(int num_vertices) const {
  return grad_tol > 0.0 ? grad_tol : 1e-6 * std::sqrt(static_cast<double>(num_vertices));
}

void project_strong_inplace(const Mesh& mesh, VectorField& u, const Points& g) {
  for (int k = 0; k < mesh.num_boundary(); ++k) {
    const int v = mesh.boundary_cycle()(k);
    const Vec2 gk = g.row(k).transpose();
    u.row(v) = (u.row(v).dot(gk.transpose()) * gk).transpose();
  }
}

VectorField project_strong(const Mesh& mesh, const VectorField& u, const BoundaryData& data) {
  VectorField out = u;
  project_strong_inplace(mesh, out, interpolate_boundary_field(mesh, data));
  return out;
}

namespace {

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

void check_seeds(const BoundaryData& data, const SeedSpec& seeds, const EnergyParams& params) {
  long twice = 0;
  for (const auto& s : seeds.interior) twice += 2L * s.degree;
  for (const auto& s : seeds.boundary) twice += s.index;
  if (twice != 2L * data.declared_degree) {
    throw TopologyError("seed charges violate 2*D = 2*sum d + sum D: degree " +
                        std::to_string(data.declared_degree) + ", 2*sum d + sum D = " +
                        std::to_string(twice));
  }
  const double eps = params.epsilon;
  double core = seeds.interior.empty() ? 0.0 : eps;
  if (!seeds.boundary.empty()) core = std::max(core, params.boundary_scale());
  std::vector<Vec2> pts;
  for (const auto& s : seeds.interior) {
    if (!contains(data.domain, s.point)) throw SeedSeparationError("interior seed outside domain");
    if (distance_to_boundary(data.domain, s.point) < 2.0 * eps) {
      throw SeedSeparationError("interior seed closer than 2 eps to the boundary");
    }
    pts.push_back(s.point);
  }
  for (const auto& s : seeds.boundary) pts.push_back(boundary_point(data.domain, s.t));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if ((pts[i] - pts[j]).norm() < 4.0 * core) {
        throw SeedSeparationError("seeds closer than four core scales");
      }
    }
  }
}

Eigen::SparseMatrix<double> stiffness(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        trip.emplace_back(mesh.triangles()(t, a), mesh.triangles()(t, b),
                          mesh.area(t) * mesh.shape_gradient(t, a).dot(mesh.shape_gradient(t, b)));
      }
    }
  }
  Eigen::SparseMatrix<double> K(mesh.num_vertices(), mesh.num_vertices());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

// Discrete harmonic extension of boundary values (cycle order).
Eigen::VectorXd harmonic_extension(const Mesh& mesh, const Eigen::VectorXd& boundary_values) {
  const int n = mesh.num_vertices();
  std::vector<int> interior_index(n, -1);
  int ni = 0;
  for (int v = 0; v < n; ++v) {
    if (mesh.boundary_slot(v) < 0) interior_index[v] = ni++;
  }
  Eigen::VectorXd out(n);
  for (int k = 0; k < mesh.num_boundary(); ++k) out(mesh.boundary_cycle()(k)) = boundary_values(k);
  if (ni == 0) return out;
  const Eigen::SparseMatrix<double> K = stiffness(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
  for (int col = 0; col < K.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      const int r = interior_index[it.row()];
      if (r < 0) continue;
      const int c = interior_index[it.col()];
      if (c >= 0) {
        trip.emplace_back(r, c, it.value());
      } else {
        rhs(r) -= it.value() * out(static_cast<int>(it.col()));
      }
    }
  }
  Eigen::SparseMatrix<double> A(ni, ni);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw ResolutionError("harmonic extension solve failed");
  const Eigen::VectorXd x = solver.solve(rhs);
  for (int v = 0; v < n; ++v) {
    if (interior_index[v] >= 0) out(v) = x(interior_index[v]);
  }
  return out;
}

VectorField aligned_field(const Mesh& mesh, const BoundaryData& data, const SeedSpec& seeds,
                          const EnergyParams& params) {
  check_seeds(data, seeds, params);
  const DomainSpec& spec = data.domain;
  const int n = mesh.num_vertices();
  const double eps = params.epsilon;
  const double core_b = params.boundary_scale();
  const int nbs = static_cast<int>(seeds.boundary.size());
  std::vector<Vec2> q(nbs);
  for (int j = 0; j < nbs; ++j) q[j] = boundary_point(spec, seeds.boundary[j].t);

  // Singular phase and the per-seed boundary angles.
  Eigen::VectorXd S = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd theta(n, nbs);
  for (int v = 0; v < n; ++v) {
    const Vec2 x = mesh.vertex(v);
    for (const auto& s : seeds.interior) {
      const Vec2 d = x - s.point;
      if (d.norm() > 0.0) S(v) += s.degree * std::atan2(d.y(), d.x());
    }
    for (int j = 0; j < nbs; ++j) {
      theta(v, j) = (x - q[j]).norm() > 1e-12
                        ? local_polar(spec, seeds.boundary[j].t, x).theta
                        : 0.5 * kPi;
      S(v) += seeds.boundary[j].index * theta(v, j);
    }
  }

  // Boundary values of the harmonic part: a continuous lift of phase - S
  // modulo pi, so that S + H = phase (mod pi) on the boundary.
  const int nb = mesh.num_boundary();
  std::vector<char> skip(nb, 0);
  Eigen::VectorXd val(nb);
  for (int k = 0; k < nb; ++k) {
    const int v = mesh.boundary_cycle()(k);
    for (int j = 0; j < nbs; ++j) {
      if ((mesh.vertex(v) - q[j]).norm() <= 1e-12) skip[k] = 1;
    }
    val(k) = data.phase(mesh.boundary_param()(k)) - S(v);
  }
  int first = 0;
  while (first < nb && skip[first]) ++first;
  if (first == nb) throw ResolutionError("boundary too coarse for the seeds");
  Eigen::VectorXd H_b(nb);
  double lift = val(first);
  double prev = val(first);
  H_b(first) = lift;
  for (int step = 1; step <= nb; ++step) {
    const int k = (first + step) % nb;
    if (skip[k] && step < nb) continue;
    lift += std::remainder(val(k) - prev, kPi);
    prev = val(k);
    if (step < nb) H_b(k) = lift;
  }
  if (std::abs(lift - H_b(first)) > 0.5 * kPi) {
    throw TopologyError("boundary phase does not close: seeds incompatible with the boundary data");
  }
  for (int k = 0; k < nb; ++k) {
    if (!skip[k]) continue;
    int a = (k + nb - 1) % nb;
    while (skip[a]) a = (a + nb - 1) % nb;
    int b = (k + 1) % nb;
    while (skip[b]) b = (b + 1) % nb;
    // Neighbours may sit on either side of the closing seam.
    const double hb = H_b(a) + std::remainder(H_b(b) - H_b(a), kPi);
    H_b(k) = 0.5 * (H_b(a) + hb);
  }
  const Eigen::VectorXd H = harmonic_extension(mesh, H_b);

  VectorField u(n, 2);
  for (int v = 0; v < n; ++v) {
    const Vec2 x = mesh.vertex(v);
    double phi = S(v) + H(v);
    double f = 1.0;
    for (const auto& s : seeds.interior) f *= std::min((x - s.point).norm() / eps, 1.0);
    for (int j = 0; j < nbs; ++j) {
      const double r = (x - q[j]).norm();
      if (params.is_weak()) {
        const double eta = std::clamp((r - core_b) / core_b, 0.0, 1.0);
        phi += (1.0 - eta) * seeds.boundary[j].index * (0.5 * kPi - theta(v, j));
      } else {
        f *= std::min(r / eps, 1.0);
      }
    }
    u(v, 0) = f * std::cos(phi);
    u(v, 1) = f * std::sin(phi);
  }
  return u;
}

}  // namespace

VectorField init_field(const Mesh& mesh, const BoundaryData& data, const SeedSpec& seeds,
                       const EnergyParams& params, std::uint64_t rng_seed) {
  params.validate();
  if (seeds.base == BaseInit::Aligned) {
    VectorField u = aligned_field(mesh, data, seeds, params);
    if (!params.is_weak()) project_strong_inplace(mesh, u, interpolate_boundary_field(mesh, data));
    return u;
  }
  if (!seeds.interior.empty() || !seeds.boundary.empty()) {
    throw ParameterError("a random base takes no seeds");
  }
  std::mt19937_64 gen(rng_seed);
  VectorField u(mesh.num_vertices(), 2);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double a = kTwoPi * uniform01(gen);
    u(v, 0) = std::cos(a);
    u(v, 1) = std::sin(a);
  }
  EnergyParams smooth = params;
  smooth.epsilon = 4.0 * params.epsilon;
  MinimizeOptions opts;
  opts.max_iters = 50;
  opts.grad_tol = 1e-300;
  return minimize(mesh, u, smooth, data, opts).u;
}

MinimizeResult minimize(const Mesh& mesh, const VectorField& u0, const EnergyParams& params,
                        const BoundaryData& data, const MinimizeOptions& opts) {
  params.validate();
  opts.validate();
  if (u0.rows() != mesh.num_vertices()) throw ParameterError("field does not conform to mesh");
  const bool strong = !params.is_weak();
  const Points g = interpolate_boundary_field(mesh, data);

  MinimizeResult res;
  MinimizeReport& rep = res.report;
  rep.grad_tol = opts.tolerance_for(mesh.num_vertices());
  VectorField u = u0;
  if (strong) project_strong_inplace(mesh, u, g);

  VectorField G;
  EnergyBreakdown E = eval_energy_gradient(mesh, u, params, g, &G);
  if (!std::isfinite(E.total)) throw DivergenceError("non-finite energy at the initial field");
  double r = dual_norm(mesh, G, u);
  auto record = [&](int it) {
    rep.energy_trace.push_back(E.total);
    rep.trace.push_back({it, E, r});
  };
  record(0);

  std::deque<double> hist{E.total};
  double alpha = opts.initial_step;
  VectorField U;
  VectorField GU;
  int it = 0;
  rep.converged = r <= rep.grad_tol;
  while (!rep.converged && it < opts.max_iters) {
    ++it;
    const double gg = flat(G).squaredNorm();
    const double ref = opts.step_rule == StepRule::BarzilaiBorwein
                           ? *std::max_element(hist.begin(), hist.end())
                           : E.total;
    EnergyBreakdown EU;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      U = u - alpha * G;
      if (strong) project_strong_inplace(mesh, U, g);
      EU = eval_energy_gradient(mesh, U, params, g, &GU);
      if (opts.step_rule == StepRule::Fixed) {
        if (!std::isfinite(EU.total)) {
          throw DivergenceError("non-finite energy at iteration " + std::to_string(it));
        }
        accepted = true;
        break;
      }
      if (std::isfinite(EU.total) && EU.total <= ref - opts.armijo_slope * alpha * gg) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(EU.total)) {
        throw DivergenceError("non-finite energy at iteration " + std::to_string(it));
      }
      --it;
      break;  // line search stalled at rounding level
    }
    const Eigen::VectorXd s = flat(U) - flat(u);
    const Eigen::VectorXd y = flat(GU) - flat(G);
    u.swap(U);
    G.swap(GU);
    E = EU;
    hist.push_back(E.total);
    if (static_cast<int>(hist.size()) > opts.memory) hist.pop_front();
    r = dual_norm(mesh, G, u);
    record(it);
    rep.converged = r <= rep.grad_tol;

    if (opts.step_rule == StepRule::BarzilaiBorwein) {
      const double sy = s.dot(y);
      if (sy > 0.0) {
        alpha = (it % 2 == 1) ? s.squaredNorm() / sy : sy / y.squaredNorm();
      } else {
        alpha *= 2.0;
      }
      alpha = std::clamp(alpha, 1e-12, 1e6);
    } else if (opts.step_rule == StepRule::Backtracking) {
      alpha = std::min(2.0 * alpha, 1e6);
    }
  }
  rep.iterations = it;
  rep.final_energy = E;
  rep.final_residual = r;
  res.u = std::move(u);
  return res;
}

double MeshPolicy::h_for(double epsilon) const {
  if (fixed_h > 0.0) {
    if (fixed_h > 0.25 * epsilon * (1.0 + 1e-12)) {
      throw ParameterError("fixed mesh size violates h <= eps/4");
    }
    return fixed_h;
  }
  if (!(h_over_epsilon > 0.0 && h_over_epsilon <= 0.25)) {
    throw ParameterError("h_over_epsilon must lie in (0, 1/4]");
  }
  return h_over_epsilon * epsilon;
}

std::vector<ContinuationRung> continuation_minimize(
    const BoundaryData& data, const MeshPolicy& policy, const std::vector<double>& schedule,
    const EnergyParams& params, const SeedSpec& seeds, const MinimizeOptions& opts,
    const std::function<void(const ContinuationRung&)>& on_rung) {
  if (schedule.empty()) throw ParameterError("empty epsilon schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i - 1])) {
      throw ParameterError("epsilon schedule must be strictly decreasing");
    }
  }
  std::vector<ContinuationRung> rungs;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    ContinuationRung rung;
    rung.epsilon = schedule[i];
    EnergyParams p = params;
    p.epsilon = schedule[i];
    const double h = policy.h_for(schedule[i]);
    VectorField start;
    if (i == 0) {
      rung.mesh = triangulate(data.domain, h);
      start = init_field(rung.mesh, data, seeds, p, opts.seed);
    } else {
      const ContinuationRung& prev = rungs.back();
      if (std::abs(prev.mesh.h() - h) <= 1e-15 * h) {
        rung.mesh = prev.mesh;
        start = prev.u;
      } else {
        rung.mesh = triangulate(data.domain, h);
        start = transfer_field(prev.mesh, prev.u, rung.mesh);
      }
    }
    MinimizeResult r = minimize(rung.mesh, start, p, data, opts);
    rung.u = std::move(r.u);
    rung.report = std::move(r.report);
    rung.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rungs.push_back(std::move(rung));
    if (on_rung) on_rung(rungs.back());
  }
  return rungs;
}

}  // namespace glv
