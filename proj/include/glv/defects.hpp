#pragma once

#include "glv/energy.hpp"

#include <string>
#include <vector>

namespace glv {

/// Vertices where |u| < 1/2, and in weak mode boundary vertices (cycle
/// order) where |<u, g_perp>| > 1/4.
struct BadSet {
  std::vector<char> interior;  // per vertex
  std::vector<char> boundary;  // per boundary slot; empty in strong mode

  int count() const;
  bool empty() const { return count() == 0; }
};

BadSet bad_set(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
               const BoundaryData& data);

enum class DefectKind { Interior, Boundary };
std::string to_string(DefectKind kind);

struct BadBall {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  DefectKind kind = DefectKind::Interior;
  double scale = 0.0;       // eps, or eps^s for weak-mode boundary balls
  double t = 0.0;           // boundary parameter of the center (boundary balls)
  double extent = 0.0;      // max distance of a flagged vertex from the center
  double separation = 0.0;  // centre distance minus the other cluster's covering radius
  double clearance = 0.0;   // distance from the centre to the nearest other flagged vertex
  std::vector<int> vertices;
};

/// Groups flagged vertices into disjoint balls. Connected components are
/// merged while their covering discs overlap; each cluster becomes an
/// interior ball if its covering disc stays clear of the boundary and a
/// boundary ball (center projected onto the boundary) otherwise. Radii start
/// from lambda * scale and are clamped to cover the cluster and to keep the
/// balls disjoint. Throws ClusteringOverflowError when a cluster extends
/// beyond 8 * lambda * scale * max_merges.
std::vector<BadBall> cluster_bad_balls(const BadSet& bad, const Mesh& mesh,
                                       const EnergyParams& params, const BoundaryData& data,
                                       double lambda = 4.0, int max_merges = 4);

/// Winding of u/|u| along a closed vertex cycle.
int degree(const Mesh& mesh, const VectorField& u, const std::vector<int>& loop);

/// Winding of u/|u| along the circle |x - center| = radius, sampled at
/// spacing <= h/2 with P1 interpolation.
int degree_on_circle(const Mesh& mesh, const VectorField& u, const Vec2& center, double radius);

/// Rounds a winding number after the 0.1 integrality check.
int checked_round(double winding);

enum class Orientation { Positive, Negative };
std::string to_string(Orientation o);

/// Sign of <u, g>; IndeterminateOrientationError when it vanishes.
Orientation orientation(const Vec2& u_value, const Vec2& g_value);

struct BoundaryIndexResult {
  int index = 0;
  double winding = 0.0;  // unrounded
  double t_plus = 0.0;
  double t_minus = 0.0;
  Orientation plus = Orientation::Positive;   // orientation of u at the forward crossing
  Orientation minus = Orientation::Positive;  // and at the backward crossing
  bool rho_checked = false;
};

/// Winding of w = (u/|u|)^2 around the half-disc contour at boundary
/// parameter t_q: the arc of radius rho inside the domain, closed along the
/// boundary with w = g^2 corrected by a linear interpolation of the phase
/// mismatch at the two crossings. If 1.5 rho <= max_rho and the larger
/// contour is admissible, the two values must agree
/// (InconsistentIndexError).
BoundaryIndexResult boundary_index(const Mesh& mesh, const VectorField& u,
                                   const BoundaryData& data, const EnergyParams& params,
                                   double t_q, double rho, double max_rho = 0.0);

struct DefectRecord {
  DefectKind kind = DefectKind::Interior;
  Vec2 center = Vec2::Zero();
  double scale = 0.0;
  int charge = 0;
  double loop_radius = 0.0;
  double ball_radius = 0.0;
  double t = 0.0;  // boundary parameter (boundary defects)
  Orientation plus = Orientation::Positive;
  Orientation minus = Orientation::Positive;
};

struct AnalysisReport {
  std::vector<DefectRecord> defects;
  int declared_degree = 0;
  int sum_d = 0;
  int sum_D = 0;
  bool identity_ok = false;
  /// Orientation flips across every odd-index boundary defect and is kept
  /// across every even one.
  bool parity_ok = true;
  int local_checks = 0;  // local super-ball identities evaluated

  int num_interior() const;
  int num_boundary() const;
};

/// Bad set, clustering, and one winding per ball. Throws TopologyAuditError
/// when 2 * degree(g) != 2 * sum d + sum D and `audit` is set.
AnalysisReport analyze(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                       const BoundaryData& data, double lambda = 4.0, bool audit = true);

std::string defects_csv(const AnalysisReport& report);

struct EtaReport {
  double radius_energy = 0.0;  // 2 eps^beta
  double radius_check = 0.0;   // eps^gamma
  double local_energy = 0.0;
  double threshold = 0.0;  // eta |ln eps|
  bool hypothesis_met = false;
  double min_modulus = 0.0;
  double max_perp = 0.0;
  bool modulus_ok = true;
  bool anchoring_ok = true;
  bool implication_holds = true;
};

/// Checks one instance of the eta-compactness implication at x0. Requires
/// 3/4 <= beta < gamma < 1 (strong) or 3s/4 <= beta < gamma < s (weak).
EtaReport eta_diagnostic(const Mesh& mesh, const VectorField& u, const EnergyParams& params,
                         const BoundaryData& data, const Vec2& x0, double beta, double gamma,
                         double eta);

}  // namespace glv
