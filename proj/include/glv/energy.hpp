#pragma once

#include "glv/mesh.hpp"

#include <string>
#include <vector>

namespace glv {

enum class AnchoringMode { Strong, Weak };

std::string to_string(AnchoringMode mode);

struct EnergyParams {
  double epsilon = 0.1;
  double s = 1.0;
  AnchoringMode mode = AnchoringMode::Strong;

  static EnergyParams strong(double epsilon) { return {epsilon, 1.0, AnchoringMode::Strong}; }
  static EnergyParams weak(double epsilon, double s) { return {epsilon, s, AnchoringMode::Weak}; }

  bool is_weak() const { return mode == AnchoringMode::Weak; }
  /// Length scale of boundary cores: eps^s in weak mode, eps otherwise.
  double boundary_scale() const;
  /// Throws ParameterError unless eps > 0 and, in weak mode, s in (0, 1].
  void validate() const;
};

struct EnergyBreakdown {
  double dirichlet = 0.0;
  double potential = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

/// Energy of a P1 field. Dirichlet is exact per triangle, the potential
/// uses edge-midpoint quadrature and the weak-mode penalty the trapezoidal
/// rule on boundary arcs. Strong mode reports penalty = 0.
EnergyBreakdown eval_energy(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                            const BoundaryData& data);

/// Assembled first variation (no mass matrix). In strong mode boundary rows
/// are projected onto span{g}.
VectorField eval_gradient(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                          const BoundaryData& data);

/// Energy and gradient in one pass over the triangles. `g` holds the anchor
/// field at the boundary vertices in cycle order.
EnergyBreakdown eval_energy_gradient(const Mesh& mesh, const VectorField& u,
                                     const EnergyParams& params, const Points& g,
                                     VectorField* grad);

/// Lumped-mass dual norm of `grad`, divided by the L2 norm of `u`.
double dual_norm(const Mesh& mesh, const VectorField& grad, const VectorField& u,
                 bool interior_only = false);

double el_residual(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                   const BoundaryData& data, bool interior_only = false);

/// Energy over omega_r(x0) = B_r(x0) intersected with the mesh. Triangles cut
/// by the circle are integrated on a subdivision.
EnergyBreakdown localized_energy(const Mesh& mesh, const VectorField& u,
                                 const EnergyParams& params, const BoundaryData& data,
                                 const Vec2& x0, double r);

/// Test vector field for the Pohozaev identity: a constant translation, or
/// x - x2.
struct PsiField {
  enum class Kind { Translation, PositionMinusX2 };
  Kind kind = Kind::PositionMinusX2;
  Vec2 vector = Vec2::Zero();  // direction, or the point x2

  static PsiField translation(const Vec2& direction) { return {Kind::Translation, direction}; }
  static PsiField position(const Vec2& x2) { return {Kind::PositionMinusX2, x2}; }
  Vec2 operator()(const Vec2& x) const {
    return kind == Kind::Translation ? vector : Vec2(x - vector);
  }
};

struct PohozaevTerms {
  double boundary = 0.0;  // flux side over the boundary of omega_r
  double bulk = 0.0;      // volume side over omega_r
  double residual = 0.0;  // |boundary - bulk|
};

/// Both sides of the Pohozaev identity on omega_r(x0). The arc is sampled at
/// spacing h/2; the part of omega_r's boundary on the mesh boundary uses the
/// polygon edges and their outward normals.
PohozaevTerms pohozaev_terms(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                             const Vec2& x0, double r, const PsiField& psi);

double pohozaev_residual(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                         const Vec2& x0, double r, const PsiField& psi);

struct RadialSample {
  double r = 0.0;
  double F = 0.0;
  double F_gamma = 0.0;  // equals F unless x0 is on the boundary in weak mode
};

/// F(r) = r * (line integral of the energy density over the arc of radius r
/// about x0 inside the domain). When x0 lies on the boundary, F_gamma adds
/// the weak penalty at the two arc endpoints.
std::vector<RadialSample> radial_profile(const Mesh& mesh, const VectorField& u,
                                         const EnergyParams& params, const BoundaryData& data,
                                         const Vec2& x0, const std::vector<double>& radii);

/// Energy density e(u) = |grad u|^2 / 2 + (1 - |u|^2)^2 / (4 eps^2).
double energy_density(const Eigen::Matrix2d& jacobian, const Vec2& u, double epsilon);

std::string energy_csv_header();
std::string energy_csv_row(const EnergyParams& params, const EnergyBreakdown& e);

}  // namespace glv
