#pragma once

#include "glv/defects.hpp"
#include "glv/minimizer.hpp"
#include "glv/renorm.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glv {

struct EtaBlock {
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  std::vector<Vec2> points;
};

struct RenormBlock {
  double h = 0.02;
  std::vector<DefectConfig> candidates;  // empty: center interior and antipodal pair
  int grid = 64;
  std::vector<double> radial;  // |p| values for the interior radial scan
};

struct InputBlock {
  std::string mesh;
  std::string field;
};

struct OutputBlock {
  std::string dir = "out";
  bool snapshots = true;
};

/// A parsed and cross-checked experiment file.
struct ExperimentConfig {
  DomainSpec domain;
  BoundaryData boundary;
  EnergyParams energy;
  std::vector<double> schedule;  // descending; a single epsilon gives one entry
  MeshPolicy mesh;
  MinimizeOptions minimize;
  SeedSpec seeds;
  double lambda = 4.0;
  std::optional<EtaBlock> eta;
  RenormBlock renorm;
  std::optional<InputBlock> input;
  OutputBlock output;
  std::uint64_t rng_seed = 0;
  std::string base_dir;  // directory of the config file, for relative input paths
};

/// Parses JSON text. Unknown keys, type mismatches and violated
/// cross-field constraints raise ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

}  // namespace glv
