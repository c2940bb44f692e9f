#pragma once

#include "glv/energy.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace glv {

enum class StepRule { BarzilaiBorwein, Fixed, Backtracking };

std::string to_string(StepRule rule);
StepRule step_rule_from_string(const std::string& name);

struct MinimizeOptions {
  int max_iters = 20000;
  /// Dual-norm stopping threshold; <= 0 selects 1e-6 * sqrt(vertex count).
  double grad_tol = 0.0;
  StepRule step_rule = StepRule::BarzilaiBorwein;
  /// Step length for StepRule::Fixed and the first trial step otherwise.
  double initial_step = 0.1;
  /// Descending epsilon ladder for continuation_minimize; empty if unused.
  std::vector<double> continuation;
  std::uint64_t seed = 0;
  /// Nonmonotone window of the BB line search.
  int memory = 10;
  double armijo_slope = 1e-4;

  void validate() const;
  double tolerance_for(int num_vertices) const;
};

struct TraceRow {
  int iter = 0;
  EnergyBreakdown energy;
  double residual = 0.0;
};

struct MinimizeReport {
  int iterations = 0;
  EnergyBreakdown final_energy;
  double final_residual = 0.0;
  double grad_tol = 0.0;
  std::vector<double> energy_trace;
  std::vector<TraceRow> trace;
  bool converged = false;
};

struct InteriorSeed {
  Vec2 point = Vec2::Zero();
  int degree = 1;
};

struct BoundarySeed {
  double t = 0.0;
  int index = 1;
};

enum class BaseInit { Aligned, Random };

struct SeedSpec {
  std::vector<InteriorSeed> interior;
  std::vector<BoundarySeed> boundary;
  BaseInit base = BaseInit::Aligned;
};

/// Seeded initial field. With an aligned base the phase is the sum of the
/// seed singularities plus a discrete harmonic correction that makes u = +-g
/// on the boundary; cores are cut off at scale eps (modulus) or, for weak-mode
/// boundary seeds, by freezing the singular phase inside eps^s. Requires
/// 2 * degree(g) = 2 * sum d + sum D (TopologyError) and seeds separated by
/// four core scales (SeedSeparationError).
///
/// A random base draws independent uniform directions per vertex from
/// `rng_seed` and takes 50 descent steps at 4 eps.
VectorField init_field(const Mesh& mesh, const BoundaryData& data, const SeedSpec& seeds,
                       const EnergyParams& params, std::uint64_t rng_seed = 0);

/// Replaces boundary values by <u, g> g; idempotent.
VectorField project_strong(const Mesh& mesh, const VectorField& u, const BoundaryData& data);
void project_strong_inplace(const Mesh& mesh, VectorField& u, const Points& g);

struct MinimizeResult {
  VectorField u;
  MinimizeReport report;
};

/// Gradient descent on the discrete energy. Strong mode keeps the iterate on
/// the constraint set by projection. Throws DivergenceError when the energy
/// becomes non-finite.
MinimizeResult minimize(const Mesh& mesh, const VectorField& u0, const EnergyParams& params,
                        const BoundaryData& data, const MinimizeOptions& opts);

/// Mesh size as a function of epsilon for continuation runs.
struct MeshPolicy {
  double h_over_epsilon = 0.25;
  double fixed_h = 0.0;  // > 0 reuses one mesh; must satisfy h <= eps/4

  double h_for(double epsilon) const;
};

struct ContinuationRung {
  double epsilon = 0.0;
  Mesh mesh;
  VectorField u;
  MinimizeReport report;
  double wall_time_s = 0.0;
};

/// Minimizes along a strictly decreasing epsilon ladder, warm-starting each
/// rung from the previous minimizer (nodal interpolation when the mesh
/// changes). The first rung starts from init_field with `seeds`. `on_rung`,
/// if set, runs after each rung.
std::vector<ContinuationRung> continuation_minimize(
    const BoundaryData& data, const MeshPolicy& policy, const std::vector<double>& schedule,
    const EnergyParams& params, const SeedSpec& seeds, const MinimizeOptions& opts,
    const std::function<void(const ContinuationRung&)>& on_rung = {});

}  // namespace glv
