#include "glv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace glv {

namespace {

namespace fs = std::filesystem;

void write_text(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

void log(const RunOptions& opts, const std::string& msg) {
  if (!opts.quiet) std::cerr << msg << '\n';
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

EnergyParams params_at(const ExperimentConfig& cfg, double epsilon) {
  EnergyParams p = cfg.energy;
  p.epsilon = epsilon;
  return p;
}

FitModel model_for(const EnergyParams& p) {
  return p.is_weak() ? FitModel::PiSDLogEps : FitModel::PiDLogEps;
}

std::string trace_csv(const MinimizeReport& rep) {
  std::ostringstream os;
  os << "iter,total,dirichlet,potential,penalty,residual\n";
  char buf[256];
  for (const TraceRow& r : rep.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.energy.total,
                  r.energy.dirichlet, r.energy.potential, r.energy.penalty, r.residual);
    os << buf;
  }
  return os.str();
}

std::string energy_csv(const EnergyParams& p, const EnergyBreakdown& e) {
  return energy_csv_header() + "\n" + energy_csv_row(p, e) + "\n";
}

std::string snapshot_text(void (*writer)(std::ostream&, const Mesh&), const Mesh& mesh) {
  std::ostringstream os;
  writer(os, mesh);
  return os.str();
}

std::string field_text(const VectorField& u) {
  std::ostringstream os;
  write_field(os, u);
  return os.str();
}

void audit(const AnalysisReport& a, const std::string& where) {
  if (!a.identity_ok) {
    throw TopologyAuditError(where + ": 2 deg(g) = " + std::to_string(2 * a.declared_degree) +
                             " but 2 sum d + sum D = " + std::to_string(2 * a.sum_d + a.sum_D));
  }
}

double boundary_separation(const AnalysisReport& a) {
  std::vector<double> ts;
  for (const DefectRecord& d : a.defects) {
    if (d.kind == DefectKind::Boundary) ts.push_back(d.t);
  }
  if (ts.size() != 2) return -1.0;
  return std::abs(wrap_angle(ts[0] - ts[1]));
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

double max_abs(const VectorField& u) {
  return u.rows() == 0 ? 0.0 : u.rowwise().norm().maxCoeff();
}

double max_edge_jump(const Mesh& mesh, const VectorField& u) {
  double m = 0.0;
  const EdgeList& e = mesh.edges();
  for (int k = 0; k < e.rows(); ++k) {
    m = std::max(m, (u.row(e(k, 0)) - u.row(e(k, 1))).norm());
  }
  return m;
}

MinimizeRun run_minimize(const ExperimentConfig& cfg, const RunOptions& opts) {
  MinimizeRun run;
  const double eps = cfg.schedule.back();
  const EnergyParams params = params_at(cfg, eps);
  if (cfg.schedule.size() > 1) {
    auto rungs = continuation_minimize(
        cfg.boundary, cfg.mesh, cfg.schedule, cfg.energy, cfg.seeds, cfg.minimize,
        [&](const ContinuationRung& r) {
          log(opts, "rung eps=" + fmt("%g", r.epsilon) + " E=" + fmt("%.6f", r.report.final_energy.total) +
                        " iters=" + std::to_string(r.report.iterations));
        });
    run.mesh = std::move(rungs.back().mesh);
    run.u = std::move(rungs.back().u);
    run.report = std::move(rungs.back().report);
  } else {
    run.mesh = triangulate(cfg.domain, cfg.mesh.h_for(eps));
    const VectorField u0 = init_field(run.mesh, cfg.boundary, cfg.seeds, params, cfg.rng_seed);
    MinimizeResult res = minimize(run.mesh, u0, params, cfg.boundary, cfg.minimize);
    run.u = std::move(res.u);
    run.report = std::move(res.report);
    log(opts, "eps=" + fmt("%g", eps) + " E=" + fmt("%.6f", run.report.final_energy.total) +
                  " iters=" + std::to_string(run.report.iterations));
  }
  run.analysis = analyze(run.mesh, run.u, params, cfg.boundary, cfg.lambda, false);

  if (!opts.out_dir.empty()) {
    write_text(opts.out_dir, "mesh.txt", snapshot_text(&write_mesh, run.mesh));
    if (cfg.output.snapshots) write_text(opts.out_dir, "field.txt", field_text(run.u));
    write_text(opts.out_dir, "trace.csv", trace_csv(run.report));
    write_text(opts.out_dir, "energy.csv", energy_csv(params, run.report.final_energy));
    write_text(opts.out_dir, "defects.csv", defects_csv(run.analysis));
  }
  audit(run.analysis, "minimize");
  return run;
}

std::vector<SeedSummary> run_multi_seed(const ExperimentConfig& cfg, const RunOptions& opts, int n) {
  if (n < 1) throw ConfigError("--seeds: must be at least 1");
  std::vector<SeedSummary> out(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      SeedSummary& s = out[static_cast<std::size_t>(k)];
      s.index = k;
      s.rng_seed = cfg.rng_seed + static_cast<std::uint64_t>(k);
      ExperimentConfig c = cfg;
      c.rng_seed = s.rng_seed;
      c.minimize.seed = s.rng_seed;
      RunOptions o;
      o.quiet = true;
      if (!opts.out_dir.empty()) o.out_dir = (fs::path(opts.out_dir) / ("seed_" + std::to_string(k))).string();
      try {
        s.run = run_minimize(c, o);
        s.status = "ok";
      } catch (const TopologyError& e) {
        s.status = e.what();
        s.topology_failure = true;
      } catch (const Error& e) {
        s.status = e.what();
      }
      s.boundary_separation = boundary_separation(s.run.analysis);
      if (!opts.quiet) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "seed " << k << ": " << s.status << '\n';
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min<int>(n, static_cast<int>(hw));
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::ostringstream os;
  os << "seed,rng_seed,status,total,iterations,converged,n_interior,n_boundary,sum_d,sum_D,"
        "identity_ok,boundary_separation\n";
  char buf[512];
  for (const SeedSummary& s : out) {
    const AnalysisReport& a = s.run.analysis;
    std::snprintf(buf, sizeof buf, "%d,%llu,%s,%.17g,%d,%s,%d,%d,%d,%d,%s,%.17g\n", s.index,
                  static_cast<unsigned long long>(s.rng_seed), sanitize(s.status).c_str(),
                  s.run.report.final_energy.total, s.run.report.iterations,
                  yes_no(s.run.report.converged), a.num_interior(), a.num_boundary(), a.sum_d,
                  a.sum_D, yes_no(a.identity_ok), s.boundary_separation);
    os << buf;
  }
  write_text(opts.out_dir, "summary.csv", os.str());
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "epsilon,h,vertices,dirichlet,potential,penalty,total,iterations,residual,converged,"
        "n_interior,n_boundary,sum_d,sum_D,identity_ok,max_abs_u,max_edge_jump,wall_time_s,"
        "slope,intercept\n";
  char buf[1024];
  for (const SweepRow& r : result.rows) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%s,%d,%d,%d,%d,%s,%.17g,%.17g,"
                  "%.6f,%.17g,%.17g\n",
                  r.epsilon, r.h, r.vertices, r.energy.dirichlet, r.energy.potential,
                  r.energy.penalty, r.energy.total, r.iterations, r.residual, yes_no(r.converged),
                  r.analysis.num_interior(), r.analysis.num_boundary(), r.analysis.sum_d,
                  r.analysis.sum_D, yes_no(r.analysis.identity_ok), r.max_abs_u, r.max_edge_jump,
                  r.wall_time_s, result.fit.slope, result.fit.intercept);
    os << buf;
  }
  return os.str();
}

SweepResult run_sweep(const ExperimentConfig& cfg, const RunOptions& opts, bool keep_fields) {
  if (cfg.schedule.size() < 3) throw ConfigError("energy.schedule: a sweep needs at least three rungs");
  SweepResult result;
  auto rungs = continuation_minimize(
      cfg.boundary, cfg.mesh, cfg.schedule, cfg.energy, cfg.seeds, cfg.minimize,
      [&](const ContinuationRung& rung) {
        const EnergyParams p = params_at(cfg, rung.epsilon);
        SweepRow row;
        row.epsilon = rung.epsilon;
        row.h = rung.mesh.h();
        row.vertices = rung.mesh.num_vertices();
        row.energy = rung.report.final_energy;
        row.iterations = rung.report.iterations;
        row.residual = rung.report.final_residual;
        row.converged = rung.report.converged;
        row.analysis = analyze(rung.mesh, rung.u, p, cfg.boundary, cfg.lambda, false);
        row.max_abs_u = max_abs(rung.u);
        row.max_edge_jump = max_edge_jump(rung.mesh, rung.u);
        row.wall_time_s = rung.wall_time_s;
        log(opts, "rung eps=" + fmt("%g", row.epsilon) + " E=" + fmt("%.6f", row.energy.total) +
                      " iters=" + std::to_string(row.iterations) + " defects=" +
                      std::to_string(row.analysis.defects.size()));
        result.rows.push_back(std::move(row));
      });
  std::vector<std::pair<double, double>> pts;
  for (const SweepRow& r : result.rows) pts.emplace_back(r.epsilon, r.energy.total);
  result.fit = fit_expansion(pts, model_for(cfg.energy), cfg.boundary.declared_degree, cfg.energy.s);
  if (keep_fields) result.rungs = std::move(rungs);

  write_text(opts.out_dir, "sweep.csv", sweep_csv(result));
  write_text(opts.out_dir, "fit.csv", fit_csv(result.fit));
  if (!opts.out_dir.empty() && cfg.output.snapshots && keep_fields) {
    for (std::size_t i = 0; i < result.rungs.size(); ++i) {
      const std::string k = std::to_string(i);
      write_text(opts.out_dir, "mesh_" + k + ".txt", snapshot_text(&write_mesh, result.rungs[i].mesh));
      write_text(opts.out_dir, "field_" + k + ".txt", field_text(result.rungs[i].u));
    }
  }
  for (const SweepRow& r : result.rows) audit(r.analysis, "sweep eps=" + fmt("%g", r.epsilon));
  return result;
}

AnalyzeRun run_analyze(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.input) throw ConfigError("input: analyze needs an input block with mesh and field paths");
  const Mesh mesh = load_mesh(cfg.input->mesh, cfg.domain);
  const VectorField u = load_field(cfg.input->field);
  if (u.rows() != mesh.num_vertices()) {
    throw ConfigError("input.field: " + std::to_string(u.rows()) + " values for " +
                      std::to_string(mesh.num_vertices()) + " vertices");
  }
  const EnergyParams params = params_at(cfg, cfg.schedule.back());
  AnalyzeRun run;
  run.energy = eval_energy(mesh, u, params, cfg.boundary);
  run.analysis = analyze(mesh, u, params, cfg.boundary, cfg.lambda, false);

  std::ostringstream eta;
  eta << "x,y,beta,gamma,eta,radius_energy,radius_check,local_energy,threshold,hypothesis_met,"
         "min_modulus,max_perp,modulus_ok,anchoring_ok,implication_holds\n";
  if (cfg.eta) {
    char buf[512];
    for (const Vec2& x : cfg.eta->points) {
      const EtaReport r =
          eta_diagnostic(mesh, u, params, cfg.boundary, x, cfg.eta->beta, cfg.eta->gamma, cfg.eta->eta);
      std::snprintf(buf, sizeof buf,
                    "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%s,%s,%s\n",
                    x.x(), x.y(), cfg.eta->beta, cfg.eta->gamma, cfg.eta->eta, r.radius_energy,
                    r.radius_check, r.local_energy, r.threshold, yes_no(r.hypothesis_met),
                    r.min_modulus, r.max_perp, yes_no(r.modulus_ok), yes_no(r.anchoring_ok),
                    yes_no(r.implication_holds));
      eta << buf;
      run.eta.push_back(r);
    }
  }
  write_text(opts.out_dir, "defects.csv", defects_csv(run.analysis));
  write_text(opts.out_dir, "energy.csv", energy_csv(params, run.energy));
  if (cfg.eta) write_text(opts.out_dir, "eta.csv", eta.str());
  audit(run.analysis, "analyze");
  return run;
}

UpperboundResult run_upperbound(const ExperimentConfig& cfg, const RunOptions& opts) {
  const int D = cfg.boundary.declared_degree;
  if (!cfg.seeds.interior.empty() || static_cast<int>(cfg.seeds.boundary.size()) != 2 * D) {
    throw ConfigError("seeds: upperbound needs exactly 2 deg(g) boundary seeds and no interior seeds");
  }
  for (const BoundarySeed& b : cfg.seeds.boundary) {
    if (b.index != 1) throw ConfigError("seeds.boundary: upperbound seeds must have index 1");
  }
  if (cfg.schedule.size() < 3) throw ConfigError("energy.schedule: upperbound needs at least three rungs");
  const double s = cfg.energy.is_weak() ? cfg.energy.s : 1.0;

  std::vector<Vec2> q;
  for (const BoundarySeed& b : cfg.seeds.boundary) q.push_back(boundary_point(cfg.domain, b.t));
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) min_sep = std::min(min_sep, (q[i] - q[j]).norm());
  }
  const double R = 0.45 * min_sep;  // seed balls stay disjoint

  UpperboundResult result;
  std::vector<std::pair<double, double>> e_pts, gap_pts;
  for (double eps : cfg.schedule) {
    const EnergyParams p = params_at(cfg, eps);
    const Mesh mesh = triangulate(cfg.domain, cfg.mesh.h_for(eps));
    const VectorField u = init_field(mesh, cfg.boundary, cfg.seeds, p, cfg.rng_seed);
    UpperboundRow row;
    row.epsilon = eps;
    row.h = mesh.h();
    row.energy = eval_energy(mesh, u, p, cfg.boundary).total;
    row.bound = kPi * s * D * std::abs(std::log(eps));
    row.gap = row.energy - row.bound;
    for (const Vec2& x : q) {
      row.seed_local_max = std::max(row.seed_local_max, localized_energy(mesh, u, p, cfg.boundary, x, R).total);
    }
    row.seed_local_bound = 0.5 * kPi * s * std::abs(std::log(eps));
    log(opts, "eps=" + fmt("%g", eps) + " E=" + fmt("%.6f", row.energy) + " gap=" + fmt("%.6f", row.gap));
    e_pts.emplace_back(eps, row.energy);
    gap_pts.emplace_back(eps, row.gap);
    result.rows.push_back(row);
  }
  result.energy_fit = fit_expansion(e_pts, model_for(cfg.energy), D, s);
  result.gap_fit = fit_expansion(gap_pts, model_for(cfg.energy), 0, s);

  std::ostringstream os;
  os << "epsilon,h,energy,bound,gap,seed_local_max,seed_local_bound\n";
  char buf[512];
  for (const UpperboundRow& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.epsilon, r.h,
                  r.energy, r.bound, r.gap, r.seed_local_max, r.seed_local_bound);
    os << buf;
  }
  write_text(opts.out_dir, "upperbound.csv", os.str());
  write_text(opts.out_dir, "energy_fit.csv", fit_csv(result.energy_fit));
  write_text(opts.out_dir, "gap_fit.csv", fit_csv(result.gap_fit));
  return result;
}

RenormRun run_renorm(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.domain.is_disc()) throw UnsupportedDomainError("renorm: only the unit disc is supported");
  if (cfg.boundary.kind != BoundaryData::Kind::Tangent) {
    throw UnsupportedDomainError("renorm: only g = tangent is supported");
  }
  const RenormBlock& rb = cfg.renorm;
  const Mesh mesh = triangulate(cfg.domain, rb.h);
  std::vector<DefectConfig> candidates = rb.candidates;
  if (candidates.empty()) {
    candidates = {DefectConfig::interior(Vec2::Zero()), DefectConfig::boundary(0.0, kPi)};
  }
  RenormRun run;
  run.ranked = compare_configs(candidates, mesh);

  const int n = rb.grid;
  run.grid = n;
  run.grid_W.assign(static_cast<std::size_t>(n) * n, std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  std::ostringstream grid;
  grid << "t1,t2,W\n";
  char buf[256];
  for (int i = 0; i < n; ++i) {
    const double ti = kTwoPi * i / n;
    for (int j = 0; j < n; ++j) {
      const double tj = kTwoPi * j / n;
      double& W = run.grid_W[static_cast<std::size_t>(i) * n + j];
      if (i != j) W = w_boundary(boundary_point(cfg.domain, ti), boundary_point(cfg.domain, tj));
      if (W < best) {
        best = W;
        run.argmin_separation = std::abs(wrap_angle(ti - tj));
      }
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", ti, tj, W);
      grid << buf;
    }
  }

  std::vector<double> radii = rb.radial;
  if (radii.empty()) {
    for (int k = 0; k < 10; ++k) radii.push_back(0.1 * k);
  }
  std::ostringstream radial;
  radial << "r,W\n";
  for (double r : radii) {
    if (!(r < 1.0 - 2.0 * mesh.h())) continue;
    const double W = w_interior(mesh, Vec2(r, 0.0));
    run.radial.emplace_back(r, W);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r, W);
    radial << buf;
  }
  log(opts, "renorm: best grid separation " + fmt("%.6f", run.argmin_separation));

  write_text(opts.out_dir, "renorm.csv", renorm_csv(run.ranked));
  write_text(opts.out_dir, "renorm_grid.csv", grid.str());
  write_text(opts.out_dir, "renorm_radial.csv", radial.str());
  return run;
}

}  // namespace glv
