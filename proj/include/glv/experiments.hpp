#pragma once

#include "glv/config.hpp"

#include <string>
#include <vector>

namespace glv {

struct RunOptions {
  std::string out_dir;  // empty: no files are written
  bool quiet = true;
};

/// Field diagnostics: sup norm and largest nodal jump along a mesh edge.
double max_abs(const VectorField& u);
double max_edge_jump(const Mesh& mesh, const VectorField& u);

struct MinimizeRun {
  Mesh mesh;
  VectorField u;
  MinimizeReport report;
  AnalysisReport analysis;
};

/// Minimizes (with continuation when the config carries a schedule) and
/// analyzes the final field. Writes mesh.txt, field.txt (if snapshots are
/// enabled), trace.csv, energy.csv and defects.csv. The defect file is
/// written before a failed degree identity raises TopologyAuditError.
MinimizeRun run_minimize(const ExperimentConfig& cfg, const RunOptions& opts);

struct SeedSummary {
  int index = 0;
  std::uint64_t rng_seed = 0;
  std::string status;  // "ok" or the error message
  bool topology_failure = false;
  MinimizeRun run;
  /// Angular separation in [0, pi] of the two boundary defects; negative
  /// unless exactly two were found.
  double boundary_separation = -1.0;
};

/// Independent runs with rng seeds cfg.rng_seed + k, k < n, executed on a
/// thread pool. Each writes into <out>/seed_k; <out>/summary.csv collects
/// one row per seed in index order.
std::vector<SeedSummary> run_multi_seed(const ExperimentConfig& cfg, const RunOptions& opts, int n);

struct SweepRow {
  double epsilon = 0.0;
  double h = 0.0;
  int vertices = 0;
  EnergyBreakdown energy;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  AnalysisReport analysis;
  double max_abs_u = 0.0;
  double max_edge_jump = 0.0;
  double wall_time_s = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  FitResult fit;
  std::vector<ContinuationRung> rungs;  // filled when keep_fields is set
};

/// Continuation across the schedule (length >= 3), analysis per rung and a
/// fit of total energy against |ln eps|. Writes sweep.csv and fit.csv.
SweepResult run_sweep(const ExperimentConfig& cfg, const RunOptions& opts, bool keep_fields = false);
std::string sweep_csv(const SweepResult& result);

struct AnalyzeRun {
  AnalysisReport analysis;
  EnergyBreakdown energy;
  std::vector<EtaReport> eta;
};

/// Re-analyzes the stored snapshot named in the input block at the first
/// epsilon of the config. Writes defects.csv, energy.csv and eta.csv.
AnalyzeRun run_analyze(const ExperimentConfig& cfg, const RunOptions& opts);

struct UpperboundRow {
  double epsilon = 0.0;
  double h = 0.0;
  double energy = 0.0;
  double bound = 0.0;  // pi s D |ln eps|
  double gap = 0.0;
  double seed_local_max = 0.0;    // largest energy in a ball about one seed
  double seed_local_bound = 0.0;  // (pi/2) s |ln eps|
};

struct UpperboundResult {
  std::vector<UpperboundRow> rows;
  FitResult energy_fit;  // E against |ln eps|
  FitResult gap_fit;     // gap against |ln eps|
};

/// Evaluates the seeded test field (no minimization) on every rung. Needs
/// exactly 2 deg(g) boundary seeds of index 1 and no interior seeds.
UpperboundResult run_upperbound(const ExperimentConfig& cfg, const RunOptions& opts);

struct RenormRun {
  std::vector<RankedConfig> ranked;
  std::vector<double> grid_W;  // row-major grid x grid, +inf on the diagonal
  int grid = 0;
  double argmin_separation = 0.0;
  std::vector<std::pair<double, double>> radial;  // (|p|, W(p))
};

/// Ranks candidates, scans W(q1, q2) on a grid of boundary parameters and
/// W(p) along a radius. Disc with g = tangent only (UnsupportedDomainError).
RenormRun run_renorm(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace glv
