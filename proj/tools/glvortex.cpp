// glvortex <minimize|sweep|analyze|upperbound|renorm> --config PATH [--out DIR] [--seeds N] [--quiet]
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 topology failure.

#include "glv/experiments.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>

namespace {

int run(const std::string& command, const glv::ExperimentConfig& cfg, const glv::RunOptions& opts,
        int seeds) {
  if (command == "minimize") {
    if (seeds > 1) {
      const auto summary = glv::run_multi_seed(cfg, opts, seeds);
      int code = 0;
      for (const auto& s : summary) {
        if (s.status == "ok") continue;
        std::cerr << "seed " << s.index << ": " << s.status << '\n';
        code = std::max(code, s.topology_failure ? 4 : 3);
      }
      return code;
    }
    const auto r = glv::run_minimize(cfg, opts);
    if (!opts.quiet) std::printf("E = %.10g after %d iterations\n", r.report.final_energy.total, r.report.iterations);
    return 0;
  }
  if (seeds > 1) throw glv::ConfigError("--seeds: only supported by minimize");
  if (command == "sweep") {
    const auto r = glv::run_sweep(cfg, opts, cfg.output.snapshots);
    if (!opts.quiet) std::printf("slope = %.6f (expected %.6f)\n", r.fit.slope, r.fit.expected_slope);
  } else if (command == "analyze") {
    const auto r = glv::run_analyze(cfg, opts);
    if (!opts.quiet) std::fputs(glv::defects_csv(r.analysis).c_str(), stdout);
  } else if (command == "upperbound") {
    const auto r = glv::run_upperbound(cfg, opts);
    if (!opts.quiet) std::printf("gap slope = %.6f\n", r.gap_fit.slope);
  } else if (command == "renorm") {
    const auto r = glv::run_renorm(cfg, opts);
    if (!opts.quiet) std::fputs(glv::renorm_csv(r.ranked).c_str(), stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ginzburg-Landau vortex experiments on planar domains"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  int seeds = 1;
  bool quiet = false;
  app.add_option("command", command, "minimize, sweep, analyze, upperbound or renorm")
      ->required()
      ->check(CLI::IsMember({"minimize", "sweep", "analyze", "upperbound", "renorm"}));
  app.add_option("--config", config_path, "experiment file (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seeds", seeds, "independent random starts (minimize only)")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const glv::ExperimentConfig cfg = glv::load_config(config_path);
    glv::RunOptions opts;
    opts.out_dir = out_dir.empty() ? cfg.output.dir : out_dir;
    opts.quiet = quiet;
    return run(command, cfg, opts, seeds);
  } catch (const glv::ConfigError& e) {
    std::cerr << "glvortex " << command << ": config error: " << e.what() << '\n';
    return 2;
  } catch (const glv::TopologyError& e) {
    std::cerr << "glvortex " << command << ": topology failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "glvortex " << command << ": " << e.what() << '\n';
    return 3;
  }
}
