#pragma once

#include "glv/mesh.hpp"

#include <string>
#include <utility>
#include <vector>

namespace glv {

/// Defect placements on the unit disc with g = tau.
struct DefectConfig {
  enum class Kind { OneInterior, TwoBoundary };
  Kind kind = Kind::OneInterior;
  Vec2 interior_point = Vec2::Zero();
  double t1 = 0.0;  // boundary parameters of q1, q2
  double t2 = kPi;

  static DefectConfig interior(const Vec2& p) { return {Kind::OneInterior, p, 0.0, 0.0}; }
  static DefectConfig boundary(double t1, double t2) { return {Kind::TwoBoundary, Vec2::Zero(), t1, t2}; }
  void validate() const;
};

std::string to_string(DefectConfig::Kind kind);

/// -pi ln|q1 - q2|. DivergenceError when q1 == q2.
double w_boundary(const Vec2& q1, const Vec2& q2);

/// Renormalized energy of one interior vortex at p on the unit disc with
/// g = tau. The singular part ln|x - p| is handled analytically; the regular
/// Neumann remainder is solved with P1 elements in a zero-mean gauge.
/// ResolutionError when |p| >= 1 - 2h.
double w_interior(const Mesh& mesh, const Vec2& p);

/// The same quantity with an explicit additive constant on the regular part;
/// the result must not depend on it.
double w_interior_gauged(const Mesh& mesh, const Vec2& p, double gauge_shift);

struct RankedConfig {
  DefectConfig config;
  double W = 0.0;
  int rank = 0;
  std::string caveat;
};

/// Evaluates W for each candidate and sorts ascending. Core energies are not
/// included; every row carries that caveat.
std::vector<RankedConfig> compare_configs(const std::vector<DefectConfig>& candidates,
                                          const Mesh& mesh);

std::string renorm_csv(const std::vector<RankedConfig>& ranked);

enum class FitModel { PiDLogEps, PiSDLogEps };
std::string to_string(FitModel model);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  FitModel model = FitModel::PiDLogEps;
  double expected_slope = 0.0;  // pi D or pi s D
};

/// Least-squares fit of E against |ln eps|. FitError with fewer than three
/// points or a degenerate design.
FitResult fit_expansion(const std::vector<std::pair<double, double>>& sweep, FitModel model,
                        int degree = 1, double s = 1.0);

std::string fit_csv(const FitResult& fit);

}  // namespace glv
