#include "glv/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace glv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      fail(join(path, it.key()), "unknown key");
    }
  }
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& field) {
  if (!j.is_boolean()) fail(field, "expected a boolean");
  return j.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Vec2 point(const json& j, const std::string& field) {
  const std::vector<double> v = numbers(j, field);
  if (v.size() != 2) fail(field, "expected [x, y]");
  return {v[0], v[1]};
}

template <typename F>
auto rethrow_as_config(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(field, e.what());
  }
}

DomainSpec parse_domain(const json& j) {
  check_keys(j, "domain", {"kind", "rho0", "cos", "sin", "tubular_width"});
  const std::string kind = j.contains("kind") ? text(j["kind"], "domain.kind") : "disc";
  const double width = j.contains("tubular_width") ? number(j["tubular_width"], "domain.tubular_width") : 0.0;
  if (kind == "disc") {
    for (const char* k : {"rho0", "cos", "sin"}) {
      if (j.contains(k)) fail(std::string("domain.") + k, "not allowed for kind \"disc\"");
    }
    return rethrow_as_config("domain.tubular_width", [&] {
      return width > 0.0 ? DomainSpec::unit_disc(width) : DomainSpec::unit_disc();
    });
  }
  if (kind != "star") fail("domain.kind", "expected \"disc\" or \"star\"");
  const double rho0 = j.contains("rho0") ? number(j["rho0"], "domain.rho0") : 1.0;
  std::vector<double> a = j.contains("cos") ? numbers(j["cos"], "domain.cos") : std::vector<double>{};
  std::vector<double> b = j.contains("sin") ? numbers(j["sin"], "domain.sin") : std::vector<double>{};
  return rethrow_as_config("domain", [&] { return DomainSpec::star(rho0, a, b, width); });
}

BoundaryData parse_boundary(const json& j, const DomainSpec& domain) {
  check_keys(j, "boundary", {"g"});
  if (!j.contains("g")) fail("boundary.g", "missing");
  const json& g = j["g"];
  BoundaryData data;
  if (g.is_string()) {
    if (g.get<std::string>() != "tangent") fail("boundary.g", "expected \"tangent\" or a Fourier block");
    data = BoundaryData::tangent(domain);
  } else {
    check_keys(g, "boundary.g", {"degree", "phase0", "cos", "sin"});
    if (!g.contains("degree")) fail("boundary.g.degree", "missing");
    const int degree = integer(g["degree"], "boundary.g.degree");
    const double phase0 = g.contains("phase0") ? number(g["phase0"], "boundary.g.phase0") : 0.0;
    std::vector<double> a = g.contains("cos") ? numbers(g["cos"], "boundary.g.cos") : std::vector<double>{};
    std::vector<double> b = g.contains("sin") ? numbers(g["sin"], "boundary.g.sin") : std::vector<double>{};
    data = BoundaryData::fourier(domain, degree, phase0, a, b);
  }
  rethrow_as_config("boundary.g", [&] { data.validate(); });
  return data;
}

void parse_energy(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "energy", {"mode", "s", "epsilon", "schedule"});
  const std::string mode = j.contains("mode") ? text(j["mode"], "energy.mode") : "strong";
  if (mode == "strong") {
    cfg.energy.mode = AnchoringMode::Strong;
    if (j.contains("s")) fail("energy.s", "only meaningful in weak mode");
    cfg.energy.s = 1.0;
  } else if (mode == "weak") {
    cfg.energy.mode = AnchoringMode::Weak;
    if (!j.contains("s")) fail("energy.s", "required in weak mode");
    cfg.energy.s = number(j["s"], "energy.s");
    if (!(cfg.energy.s > 0.0 && cfg.energy.s <= 1.0)) fail("energy.s", "must lie in (0, 1]");
  } else {
    fail("energy.mode", "expected \"strong\" or \"weak\"");
  }
  if (j.contains("epsilon") == j.contains("schedule")) {
    fail("energy.epsilon", "give exactly one of epsilon or schedule");
  }
  if (j.contains("epsilon")) {
    cfg.schedule = {number(j["epsilon"], "energy.epsilon")};
  } else {
    cfg.schedule = numbers(j["schedule"], "energy.schedule");
    if (cfg.schedule.empty()) fail("energy.schedule", "must not be empty");
  }
  for (std::size_t i = 0; i < cfg.schedule.size(); ++i) {
    if (!(cfg.schedule[i] > 0.0)) fail("energy.schedule", "epsilon must be positive");
    if (i > 0 && !(cfg.schedule[i] < cfg.schedule[i - 1])) {
      fail("energy.schedule", "must be strictly decreasing");
    }
  }
  cfg.energy.epsilon = cfg.schedule.front();
}

void parse_mesh(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "mesh", {"h_over_epsilon", "h"});
  if (j.contains("h_over_epsilon") && j.contains("h")) fail("mesh.h", "give one of h or h_over_epsilon");
  if (j.contains("h_over_epsilon")) {
    const double r = number(j["h_over_epsilon"], "mesh.h_over_epsilon");
    if (!(r > 0.0 && r <= 0.25)) fail("mesh.h_over_epsilon", "must lie in (0, 1/4]");
    cfg.mesh.h_over_epsilon = r;
  }
  if (j.contains("h")) {
    const double h = number(j["h"], "mesh.h");
    if (!(h > 0.0)) fail("mesh.h", "must be positive");
    for (double eps : cfg.schedule) {
      if (h > 0.25 * eps * (1.0 + 1e-12)) fail("mesh.h", "must satisfy h <= epsilon/4 on every rung");
    }
    cfg.mesh.fixed_h = h;
  }
}

void parse_minimize(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "minimize", {"max_iters", "grad_tol", "step_rule", "initial_step", "memory", "armijo_slope"});
  MinimizeOptions& o = cfg.minimize;
  if (j.contains("max_iters")) o.max_iters = integer(j["max_iters"], "minimize.max_iters");
  if (j.contains("grad_tol")) o.grad_tol = number(j["grad_tol"], "minimize.grad_tol");
  if (j.contains("step_rule")) {
    const std::string rule = text(j["step_rule"], "minimize.step_rule");
    o.step_rule = rethrow_as_config("minimize.step_rule", [&] { return step_rule_from_string(rule); });
  }
  if (j.contains("initial_step")) o.initial_step = number(j["initial_step"], "minimize.initial_step");
  if (j.contains("memory")) o.memory = integer(j["memory"], "minimize.memory");
  if (j.contains("armijo_slope")) o.armijo_slope = number(j["armijo_slope"], "minimize.armijo_slope");
  rethrow_as_config("minimize", [&] { o.validate(); });
}

void parse_seeds(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "seeds", {"base", "interior", "boundary"});
  SeedSpec& s = cfg.seeds;
  if (j.contains("base")) {
    const std::string base = text(j["base"], "seeds.base");
    if (base == "aligned") {
      s.base = BaseInit::Aligned;
    } else if (base == "random") {
      s.base = BaseInit::Random;
    } else {
      fail("seeds.base", "expected \"aligned\" or \"random\"");
    }
  }
  if (j.contains("interior")) {
    const json& a = j["interior"];
    if (!a.is_array()) fail("seeds.interior", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = "seeds.interior[" + std::to_string(i) + "]";
      check_keys(a[i], p, {"point", "degree"});
      if (!a[i].contains("point")) fail(p + ".point", "missing");
      InteriorSeed seed;
      seed.point = point(a[i]["point"], p + ".point");
      if (a[i].contains("degree")) seed.degree = integer(a[i]["degree"], p + ".degree");
      if (!contains(cfg.domain, seed.point)) fail(p + ".point", "outside the domain");
      s.interior.push_back(seed);
    }
  }
  if (j.contains("boundary")) {
    const json& a = j["boundary"];
    if (!a.is_array()) fail("seeds.boundary", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = "seeds.boundary[" + std::to_string(i) + "]";
      check_keys(a[i], p, {"t", "index"});
      if (!a[i].contains("t")) fail(p + ".t", "missing");
      BoundarySeed seed;
      seed.t = number(a[i]["t"], p + ".t");
      if (a[i].contains("index")) seed.index = integer(a[i]["index"], p + ".index");
      s.boundary.push_back(seed);
    }
  }
  const bool any = !s.interior.empty() || !s.boundary.empty();
  if (s.base == BaseInit::Random && any) fail("seeds.base", "a random base takes no seeds");
  if (s.base == BaseInit::Aligned) {
    int total = 0;
    for (const auto& d : s.interior) total += 2 * d.degree;
    for (const auto& d : s.boundary) total += d.index;
    if (total != 2 * cfg.boundary.declared_degree) {
      fail("seeds", "charges violate 2 deg(g) = 2 sum d + sum D");
    }
  }
}

void parse_eta(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "eta", {"beta", "gamma", "eta", "points"});
  EtaBlock e;
  for (const char* k : {"beta", "gamma", "eta", "points"}) {
    if (!j.contains(k)) fail(std::string("eta.") + k, "missing");
  }
  e.beta = number(j["beta"], "eta.beta");
  e.gamma = number(j["gamma"], "eta.gamma");
  e.eta = number(j["eta"], "eta.eta");
  const double s = cfg.energy.is_weak() ? cfg.energy.s : 1.0;
  if (!(e.beta >= 0.75 * s)) fail("eta.beta", "must be at least 3s/4");
  if (!(e.beta < e.gamma)) fail("eta.beta", "must be smaller than eta.gamma");
  if (!(e.gamma < s)) fail("eta.gamma", "must be smaller than s (1 in strong mode)");
  if (!(e.eta > 0.0)) fail("eta.eta", "must be positive");
  const json& pts = j["points"];
  if (!pts.is_array()) fail("eta.points", "expected an array of [x, y]");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    e.points.push_back(point(pts[i], "eta.points[" + std::to_string(i) + "]"));
  }
  cfg.eta = e;
}

void parse_renorm(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "renorm", {"h", "candidates", "grid", "radial"});
  RenormBlock& r = cfg.renorm;
  if (j.contains("h")) r.h = number(j["h"], "renorm.h");
  if (!(r.h > 0.0 && r.h <= 0.25)) fail("renorm.h", "must lie in (0, 1/4]");
  if (j.contains("grid")) r.grid = integer(j["grid"], "renorm.grid");
  if (r.grid < 2) fail("renorm.grid", "must be at least 2");
  if (j.contains("radial")) r.radial = numbers(j["radial"], "renorm.radial");
  for (double x : r.radial) {
    if (!(x >= 0.0 && x < 1.0)) fail("renorm.radial", "values must lie in [0, 1)");
  }
  if (j.contains("candidates")) {
    const json& a = j["candidates"];
    if (!a.is_array()) fail("renorm.candidates", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = "renorm.candidates[" + std::to_string(i) + "]";
      check_keys(a[i], p, {"kind", "p", "t1", "t2"});
      const std::string kind = a[i].contains("kind") ? text(a[i]["kind"], p + ".kind") : "";
      DefectConfig c;
      if (kind == "one-interior") {
        if (!a[i].contains("p")) fail(p + ".p", "missing");
        c = DefectConfig::interior(point(a[i]["p"], p + ".p"));
      } else if (kind == "two-boundary") {
        if (!a[i].contains("t1") || !a[i].contains("t2")) fail(p + ".t1", "t1 and t2 required");
        c = DefectConfig::boundary(number(a[i]["t1"], p + ".t1"), number(a[i]["t2"], p + ".t2"));
      } else {
        fail(p + ".kind", "expected \"one-interior\" or \"two-boundary\"");
      }
      rethrow_as_config(p, [&] { c.validate(); });
      r.candidates.push_back(c);
    }
  }
}

void parse_input(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "input", {"mesh", "field"});
  if (!j.contains("mesh")) fail("input.mesh", "missing");
  if (!j.contains("field")) fail("input.field", "missing");
  InputBlock in;
  in.mesh = text(j["mesh"], "input.mesh");
  in.field = text(j["field"], "input.field");
  namespace fs = std::filesystem;
  for (std::string* s : {&in.mesh, &in.field}) {
    if (fs::path(*s).is_relative()) *s = (fs::path(cfg.base_dir) / *s).string();
  }
  cfg.input = in;
}

void parse_output(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "output", {"dir", "snapshots"});
  if (j.contains("dir")) cfg.output.dir = text(j["dir"], "output.dir");
  if (j.contains("snapshots")) cfg.output.snapshots = boolean(j["snapshots"], "output.snapshots");
}

}  // namespace

ExperimentConfig parse_config(const std::string& source, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  check_keys(j, "", {"domain", "boundary", "energy", "mesh", "minimize", "seeds", "analysis", "eta",
                     "renorm", "input", "output", "rng_seed"});
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  cfg.domain = j.contains("domain") ? parse_domain(j["domain"]) : DomainSpec::unit_disc();
  if (!j.contains("boundary")) fail("boundary", "missing");
  cfg.boundary = parse_boundary(j["boundary"], cfg.domain);
  if (!j.contains("energy")) fail("energy", "missing");
  parse_energy(j["energy"], cfg);
  if (j.contains("mesh")) parse_mesh(j["mesh"], cfg);
  if (j.contains("minimize")) parse_minimize(j["minimize"], cfg);
  if (j.contains("seeds")) {
    parse_seeds(j["seeds"], cfg);
  } else if (cfg.boundary.declared_degree == 1) {
    // One interior vortex at the origin is the natural default for degree 1.
    cfg.seeds.interior.push_back({Vec2::Zero(), 1});
  } else {
    fail("seeds", "required unless deg(g) = 1");
  }
  if (j.contains("analysis")) {
    check_keys(j["analysis"], "analysis", {"lambda"});
    if (j["analysis"].contains("lambda")) cfg.lambda = number(j["analysis"]["lambda"], "analysis.lambda");
    if (!(cfg.lambda > 0.0)) fail("analysis.lambda", "must be positive");
  }
  if (j.contains("eta")) parse_eta(j["eta"], cfg);
  if (j.contains("renorm")) parse_renorm(j["renorm"], cfg);
  if (j.contains("input")) parse_input(j["input"], cfg);
  if (j.contains("output")) parse_output(j["output"], cfg);
  if (j.contains("rng_seed")) {
    if (!j["rng_seed"].is_number_unsigned()) fail("rng_seed", "expected a non-negative integer");
    cfg.rng_seed = j["rng_seed"].get<std::uint64_t>();
  }
  cfg.minimize.seed = cfg.rng_seed;
  if (cfg.schedule.size() > 1) cfg.minimize.continuation = cfg.schedule;
  rethrow_as_config("energy", [&] { cfg.energy.validate(); });
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), parent.empty() ? "." : parent.string());
}

}  // namespace glv
