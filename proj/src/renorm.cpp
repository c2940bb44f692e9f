#include "glv/renorm.hpp"

#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace glv {

void DefectConfig::validate() const {
  if (kind == Kind::OneInterior) {
    if (!(interior_point.norm() < 1.0)) throw ParameterError("interior point must satisfy |p| < 1");
  } else if (std::abs(wrap_angle(t1 - t2)) == 0.0) {
    throw DivergenceError("boundary points coincide");
  }
}

std::string to_string(DefectConfig::Kind kind) {
  return kind == DefectConfig::Kind::OneInterior ? "one-interior" : "two-boundary";
}

double w_boundary(const Vec2& q1, const Vec2& q2) {
  const double d = (q1 - q2).norm();
  if (!(d > 0.0)) throw DivergenceError("W(q1, q2) diverges for coincident points");
  return -kPi * std::log(d);
}

namespace {

constexpr int kBoundarySamples = 4096;

double d_n_log(const Vec2& x, const Vec2& p) {
  // Outward normal of the unit circle at x is x.
  const Vec2 d = x - p;
  return d.dot(x) / d.squaredNorm();
}

}  // namespace

double w_interior_gauged(const Mesh& mesh, const Vec2& p, double gauge_shift) {
  if (!(p.norm() < 1.0 - 2.0 * mesh.h())) {
    throw ResolutionError("interior point too close to the boundary for this mesh");
  }
  // Neumann data for the regular part: curvature minus the flux of ln|x - p|.
  double compat = 0.0;
  double self = 0.0;
  double cross_term = 0.0;
  const double dt = kTwoPi / kBoundarySamples;
  for (int k = 0; k < kBoundarySamples; ++k) {
    const double t = k * dt;
    const Vec2 x(std::cos(t), std::sin(t));
    const double L = std::log((x - p).norm());
    const double dn = d_n_log(x, p);
    compat += (1.0 - dn) * dt;
    self += 0.5 * L * dn * dt;
    cross_term += L * (1.0 - dn) * dt;
  }
  if (std::abs(compat) > 1e-10) {
    throw ResolutionError("Neumann data fails the compatibility condition");
  }

  const int n = mesh.num_vertices();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd wsum = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < mesh.num_boundary(); ++k) {
    const int v = mesh.boundary_cycle()(k);
    const Vec2 x = mesh.vertex(v);
    f(v) = mesh.boundary_weight()(k) * (1.0 - d_n_log(x, p));
    wsum(v) = mesh.boundary_weight()(k);
  }
  f -= (f.sum() / wsum.sum()) * wsum;

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
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  // Pin vertex 0 to remove the constant null space.
  Eigen::SparseMatrix<double> A = K;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      if (it.row() == 0 || it.col() == 0) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  }
  Eigen::VectorXd rhs = f;
  rhs(0) = 0.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw ResolutionError("Neumann solve failed");
  Eigen::VectorXd phi = solver.solve(rhs);
  const Eigen::VectorXd& m = mesh.lumped_mass();
  phi.array() -= phi.dot(m) / m.sum();
  phi.array() += gauge_shift;
  const double regular = 0.5 * phi.dot(K * phi);
  return self + cross_term + regular;
}

double w_interior(const Mesh& mesh, const Vec2& p) { return w_interior_gauged(mesh, p, 0.0); }

std::vector<RankedConfig> compare_configs(const std::vector<DefectConfig>& candidates,
                                          const Mesh& mesh) {
  std::vector<RankedConfig> out;
  for (const DefectConfig& c : candidates) {
    c.validate();
    RankedConfig r;
    r.config = c;
    if (c.kind == DefectConfig::Kind::OneInterior) {
      r.W = w_interior(mesh, c.interior_point);
    } else {
      r.W = w_boundary(Vec2(std::cos(c.t1), std::sin(c.t1)), Vec2(std::cos(c.t2), std::sin(c.t2)));
    }
    r.caveat = "W only; core energies not included";
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedConfig& a, const RankedConfig& b) { return a.W < b.W; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

std::string renorm_csv(const std::vector<RankedConfig>& ranked) {
  std::ostringstream os;
  os << "kind,p_x,p_y,q1_t,q2_t,W,rank,caveat\n";
  char buf[256];
  for (const RankedConfig& r : ranked) {
    const bool interior = r.config.kind == DefectConfig::Kind::OneInterior;
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%s,%.17g,%d,%s\n", to_string(r.config.kind).c_str(),
                  interior ? std::to_string(r.config.interior_point.x()).c_str() : "",
                  interior ? std::to_string(r.config.interior_point.y()).c_str() : "",
                  interior ? "" : std::to_string(r.config.t1).c_str(),
                  interior ? "" : std::to_string(r.config.t2).c_str(), r.W, r.rank,
                  r.caveat.c_str());
    os << buf;
  }
  return os.str();
}

std::string to_string(FitModel model) {
  return model == FitModel::PiDLogEps ? "pi_D_logeps" : "pi_s_D_logeps";
}

FitResult fit_expansion(const std::vector<std::pair<double, double>>& sweep, FitModel model,
                        int degree, double s) {
  if (sweep.size() < 3) throw FitError("fit needs at least three rungs");
  const int n = static_cast<int>(sweep.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    if (!(sweep[i].first > 0.0)) throw FitError("epsilon must be positive");
    X(i, 0) = std::abs(std::log(sweep[i].first));
    X(i, 1) = 1.0;
    y(i) = sweep[i].second;
  }
  const double spread = X.col(0).maxCoeff() - X.col(0).minCoeff();
  if (!(spread > 1e-12)) throw FitError("degenerate design: epsilon values coincide");
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
  FitResult r;
  r.slope = beta(0);
  r.intercept = beta(1);
  r.max_residual = (X * beta - y).cwiseAbs().maxCoeff();
  r.model = model;
  r.expected_slope = kPi * degree * (model == FitModel::PiSDLogEps ? s : 1.0);
  return r;
}

std::string fit_csv(const FitResult& fit) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "slope,intercept,max_residual,model\n%.17g,%.17g,%.17g,%s\n",
                fit.slope, fit.intercept, fit.max_residual, to_string(fit.model).c_str());
  return buf;
}

}  // namespace glv
