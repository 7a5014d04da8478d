// SPDX-License-Identifier: Apache-2.0

#include "ellik/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ellik/io.hpp"

namespace ellik {

namespace {

const std::map<std::string, std::set<std::string>>& key_registry() {
  static const std::map<std::string, std::set<std::string>> registry = {
      {"experiment", {"name", "bc"}},
      {"mesh", {"origin", "extent", "divisions", "mask"}},
      {"coeffs",
       {"pattern", "gamma_lo", "gamma_hi", "center", "radius", "gamma_in", "gamma_out", "axis",
        "angle_deg", "lambda", "k", "k_list", "k_field", "k0", "k_lo", "k_hi", "b", "b_tilde",
        "c"}},
      {"estimator",
       {"x0", "r", "alpha", "p", "r_min", "r_max", "q", "radii", "T", "steps_list",
        "divisions_list", "R_list", "spacing", "probe", "f"}},
      {"solver", {"tol", "max_iter", "preconditioner", "dense_cap"}},
      {"output", {"dir", "csv", "vtk"}},
  };
  return registry;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

void check_known(const std::string& section, const std::string& key, int line) {
  const auto& reg = key_registry();
  const auto sit = reg.find(section);
  const std::string at = line >= 0 ? " (line " + std::to_string(line) + ")" : "";
  if (sit == reg.end()) throw ConfigError("unknown config section [" + section + "]" + at);
  if (!key.empty() && !sit->second.count(key))
    throw ConfigError("unknown config key " + section + "." + key + at);
}

std::vector<Real> parse_reals(const std::string& path, const std::string& text) {
  std::istringstream is(text);
  std::vector<Real> out;
  Real v;
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw ConfigError(path + ": expected numbers, got '" + text + "'");
  if (out.empty()) throw ConfigError(path + ": empty value");
  return out;
}

Real parse_real(const std::string& path, const std::string& text) {
  const auto vals = parse_reals(path, text);
  if (vals.size() != 1) throw ConfigError(path + ": expected a single number");
  return vals[0];
}

int parse_int(const std::string& path, const std::string& text) {
  const Real v = parse_real(path, text);
  const int i = static_cast<int>(v);
  if (static_cast<Real>(i) != v) throw ConfigError(path + ": expected an integer");
  return i;
}

Vec3 parse_vec3(const std::string& path, const std::string& text) {
  const auto vals = parse_reals(path, text);
  if (vals.size() != 3) throw ConfigError(path + ": expected 3 numbers");
  return Vec3(vals[0], vals[1], vals[2]);
}

Vec3i parse_vec3i(const std::string& path, const std::string& text) {
  const Vec3 v = parse_vec3(path, text);
  const Vec3i i(static_cast<int>(v.x()), static_cast<int>(v.y()), static_cast<int>(v.z()));
  if ((i.cast<Real>() - v).norm() != 0) throw ConfigError(path + ": expected integers");
  return i;
}

std::vector<int> parse_ints(const std::string& path, const std::string& text) {
  const auto vals = parse_reals(path, text);
  std::vector<int> out;
  for (Real v : vals) {
    const int i = static_cast<int>(v);
    if (static_cast<Real>(i) != v) throw ConfigError(path + ": expected integers");
    out.push_back(i);
  }
  return out;
}

bool parse_bool(const std::string& path, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(path + ": expected a boolean (true/false)");
}

}  // namespace

std::string RawConfig::canonical() const {
  std::string out;
  for (const auto& [section, keys] : sections)
    for (const auto& [key, value] : keys) out += section + "." + key + "=" + value + "\n";
  return out;
}

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (const char marker : {'#', ';'}) {
      const auto pos = line.find(marker);
      if (pos != std::string::npos) line.erase(pos);
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config parse error at line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      check_known(section, "", lineno);
      raw.sections[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config parse error at line " + std::to_string(lineno) + ", column " +
                        std::to_string(t.size()) + ": expected 'key = value'");
    if (section.empty())
      throw ConfigError("config parse error at line " + std::to_string(lineno) +
                        ": key outside any [section]");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    check_known(section, key, lineno);
    if (raw.sections[section].count(key))
      throw ConfigError("config parse error at line " + std::to_string(lineno) + ": duplicate key " +
                        section + "." + key);
    raw.sections[section][key] = value;
  }
  return raw;
}

RawConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(RawConfig& raw, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  const std::string value = trim(assignment.substr(eq + 1));
  check_known(section, key, -1);
  raw.sections[section][key] = value;
}

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::solve, "solve"},
      {Experiment::mms, "mms"},
      {Experiment::green_decay, "green-decay"},
      {Experiment::neumann_sweep, "neumann-sweep"},
      {Experiment::k_independence, "k-independence"},
      {Experiment::energy, "energy"},
      {Experiment::lift_check, "lift-check"},
      {Experiment::truncation, "truncation"},
      {Experiment::oscillation, "oscillation"},
  };
  return names;
}

std::string to_string(Experiment e) {
  for (const auto& [exp, name] : experiment_names())
    if (exp == e) return name;
  return "?";
}

Experiment experiment_from_string(const std::string& name) {
  for (const auto& [exp, n] : experiment_names())
    if (n == name) return exp;
  throw ConfigError("experiment.name: unknown experiment '" + name + "'");
}

BoxMesh ExperimentConfig::make_mesh() const {
  std::optional<CellMask> m;
  if (mask != "none") m = make_builtin_mask(mask, origin, extent);
  return build_box_mesh(origin, extent, divisions, m);
}

CoefficientSet ExperimentConfig::make_coeffs(const BoxMesh& mesh) const {
  CoefficientSet cs = pattern(gamma_pattern, mesh, k);
  if (k_field == "half-step") {
    const Real mid = origin.x() + 0.5 * extent.x();
    for (int cell = 0; cell < mesh.cell_count(); ++cell)
      cs.k[cell] = mesh.cell_center(cell).x() < mid ? k_lo : k_hi;
    cs.k_is_constant = false;
  } else if (k_field == "sine") {
    for (int cell = 0; cell < mesh.cell_count(); ++cell)
      cs.k[cell] = k0 + std::sin(2.0 * kPi * mesh.cell_center(cell).x());
    cs.k_is_constant = false;
  }
  if (has_b) cs.b.assign(mesh.cell_count(), b);
  if (has_b_tilde) cs.b_tilde.assign(mesh.cell_count(), b_tilde);
  if (has_c) cs.c.assign(mesh.cell_count(), c);
  return cs;
}

ExperimentConfig validate_config(const RawConfig& raw) {
  for (const auto& [section, keys] : raw.sections) {
    check_known(section, "", -1);
    for (const auto& [key, value] : keys) check_known(section, key, -1);
  }
  const auto get = [&](const std::string& section, const std::string& key) -> const std::string* {
    const auto sit = raw.sections.find(section);
    if (sit == raw.sections.end()) return nullptr;
    const auto kit = sit->second.find(key);
    return kit == sit->second.end() ? nullptr : &kit->second;
  };

  ExperimentConfig cfg;
  cfg.config_hash = [&raw] {
    std::ostringstream os;
    os << std::hex << fnv1a64(raw.canonical());
    return os.str();
  }();

  const std::string* name = get("experiment", "name");
  if (!name) throw ConfigError("experiment.name: required");
  cfg.experiment = experiment_from_string(*name);

  if (const auto* v = get("experiment", "bc")) {
    if (*v == "dirichlet")
      cfg.bc = BC::dirichlet;
    else if (*v == "neumann")
      cfg.bc = BC::neumann;
    else
      throw ConfigError("experiment.bc: expected dirichlet or neumann");
  }

  if (const auto* v = get("mesh", "origin")) cfg.origin = parse_vec3("mesh.origin", *v);
  if (const auto* v = get("mesh", "extent")) cfg.extent = parse_vec3("mesh.extent", *v);
  if (const auto* v = get("mesh", "divisions")) cfg.divisions = parse_vec3i("mesh.divisions", *v);
  if (const auto* v = get("mesh", "mask")) cfg.mask = *v;
  if (cfg.mask != "none" && cfg.mask != "l-shape" && cfg.mask != "cube-hole")
    throw ConfigError("mesh.mask: unknown mask '" + cfg.mask + "'");
  for (int d = 0; d < 3; ++d) {
    if (cfg.divisions[d] < 1) throw ConfigError("mesh.divisions: must be >= 1 per axis");
    if (!(cfg.extent[d] > 0)) throw ConfigError("mesh.extent: must be > 0 per axis");
  }

  // coefficients
  std::string pat = "identity";
  if (const auto* v = get("coeffs", "pattern")) pat = *v;
  const Real gamma_lo = get("coeffs", "gamma_lo")
                            ? parse_real("coeffs.gamma_lo", *get("coeffs", "gamma_lo"))
                            : 1.0;
  const Real gamma_hi = get("coeffs", "gamma_hi")
                            ? parse_real("coeffs.gamma_hi", *get("coeffs", "gamma_hi"))
                            : 100.0;
  Vec3 center = cfg.origin + 0.5 * cfg.extent;
  if (const auto* v = get("coeffs", "center")) center = parse_vec3("coeffs.center", *v);
  const Real radius =
      get("coeffs", "radius") ? parse_real("coeffs.radius", *get("coeffs", "radius")) : 0.25;
  const Real g_in =
      get("coeffs", "gamma_in") ? parse_real("coeffs.gamma_in", *get("coeffs", "gamma_in")) : 10.0;
  const Real g_out = get("coeffs", "gamma_out")
                         ? parse_real("coeffs.gamma_out", *get("coeffs", "gamma_out"))
                         : 1.0;
  Vec3 axis = Vec3::UnitZ();
  if (const auto* v = get("coeffs", "axis")) axis = parse_vec3("coeffs.axis", *v);
  const Real angle_deg = get("coeffs", "angle_deg")
                             ? parse_real("coeffs.angle_deg", *get("coeffs", "angle_deg"))
                             : 30.0;
  Vec3 lambda = Vec3::Ones();
  if (const auto* v = get("coeffs", "lambda")) lambda = parse_vec3("coeffs.lambda", *v);

  if (pat == "identity")
    cfg.gamma_pattern = PatternSpec::identity();
  else if (pat == "checkerboard")
    cfg.gamma_pattern = PatternSpec::checkerboard(gamma_lo, gamma_hi);
  else if (pat == "sphere-inclusion")
    cfg.gamma_pattern = PatternSpec::sphere_inclusion(center, radius, g_in * Mat3::Identity(),
                                                      g_out * Mat3::Identity());
  else if (pat == "rotated-aniso")
    cfg.gamma_pattern = PatternSpec::rotated_aniso(axis, angle_deg * kPi / 180.0, lambda.x(),
                                                   lambda.y(), lambda.z());
  else
    throw ConfigError("coeffs.pattern: unknown pattern '" + pat + "'");

  if (const auto* v = get("coeffs", "k")) cfg.k = parse_real("coeffs.k", *v);
  if (const auto* v = get("coeffs", "k_list")) cfg.k_list = parse_reals("coeffs.k_list", *v);
  if (const auto* v = get("coeffs", "k_field")) cfg.k_field = *v;
  if (cfg.k_field != "constant" && cfg.k_field != "half-step" && cfg.k_field != "sine")
    throw ConfigError("coeffs.k_field: expected constant, half-step, or sine");
  if (const auto* v = get("coeffs", "k0")) cfg.k0 = parse_real("coeffs.k0", *v);
  if (const auto* v = get("coeffs", "k_lo")) cfg.k_lo = parse_real("coeffs.k_lo", *v);
  if (const auto* v = get("coeffs", "k_hi")) cfg.k_hi = parse_real("coeffs.k_hi", *v);
  if (const auto* v = get("coeffs", "b")) {
    cfg.b = parse_vec3("coeffs.b", *v);
    cfg.has_b = true;
  }
  if (const auto* v = get("coeffs", "b_tilde")) {
    cfg.b_tilde = parse_vec3("coeffs.b_tilde", *v);
    cfg.has_b_tilde = true;
  }
  if (const auto* v = get("coeffs", "c")) {
    cfg.c = parse_real("coeffs.c", *v);
    cfg.has_c = true;
  }

  // estimator block
  cfg.x0 = cfg.origin + 0.5 * cfg.extent;
  if (const auto* v = get("estimator", "x0")) cfg.x0 = parse_vec3("estimator.x0", *v);
  if (const auto* v = get("estimator", "r")) cfg.r = parse_real("estimator.r", *v);
  if (const auto* v = get("estimator", "alpha")) cfg.alpha = parse_real("estimator.alpha", *v);
  if (const auto* v = get("estimator", "p")) cfg.p = parse_real("estimator.p", *v);
  if (const auto* v = get("estimator", "r_min")) cfg.r_min = parse_real("estimator.r_min", *v);
  if (const auto* v = get("estimator", "r_max")) cfg.r_max = parse_real("estimator.r_max", *v);
  if (const auto* v = get("estimator", "q")) cfg.q = parse_real("estimator.q", *v);
  if (const auto* v = get("estimator", "radii")) cfg.radii = parse_reals("estimator.radii", *v);
  if (const auto* v = get("estimator", "T")) cfg.lift_T = parse_real("estimator.T", *v);
  if (const auto* v = get("estimator", "steps_list"))
    cfg.steps_list = parse_ints("estimator.steps_list", *v);
  if (const auto* v = get("estimator", "divisions_list"))
    cfg.divisions_list = parse_ints("estimator.divisions_list", *v);
  if (const auto* v = get("estimator", "R_list")) cfg.R_list = parse_reals("estimator.R_list", *v);
  if (const auto* v = get("estimator", "spacing"))
    cfg.spacing = parse_real("estimator.spacing", *v);
  if (const auto* v = get("estimator", "probe")) cfg.probe = parse_vec3("estimator.probe", *v);
  if (const auto* v = get("estimator", "f")) {
    const auto vals = parse_reals("estimator.f", *v);
    if (vals.size() == 1)
      cfg.f = Complex(vals[0], 0);
    else if (vals.size() == 2)
      cfg.f = Complex(vals[0], vals[1]);
    else
      throw ConfigError("estimator.f: expected 1 or 2 numbers (re [im])");
  }

  // solver block
  if (const auto* v = get("solver", "tol")) cfg.solver.tol = parse_real("solver.tol", *v);
  if (!(cfg.solver.tol > 0)) throw ConfigError("solver.tol: must be > 0");
  if (const auto* v = get("solver", "max_iter"))
    cfg.solver.max_iter = parse_int("solver.max_iter", *v);
  if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter: must be >= 1");
  if (const auto* v = get("solver", "preconditioner")) {
    if (*v == "jacobi")
      cfg.solver.precond = Preconditioner::jacobi;
    else if (*v == "none")
      cfg.solver.precond = Preconditioner::none;
    else
      throw ConfigError("solver.preconditioner: expected jacobi or none");
  }
  if (const auto* v = get("solver", "dense_cap"))
    cfg.solver.dense_cap = parse_int("solver.dense_cap", *v);

  // output block
  if (const auto* v = get("output", "dir")) cfg.output_dir = *v;
  if (cfg.output_dir.empty()) throw ConfigError("output.dir: must not be empty");
  if (const auto* v = get("output", "csv")) cfg.write_csv = parse_bool("output.csv", *v);
  if (const auto* v = get("output", "vtk")) cfg.write_vtk = parse_bool("output.vtk", *v);

  // experiment-specific requirements
  const bool needs_k_list = cfg.experiment == Experiment::neumann_sweep ||
                            cfg.experiment == Experiment::k_independence ||
                            cfg.experiment == Experiment::energy;
  if (needs_k_list && cfg.k_list.empty()) cfg.k_list = {cfg.k};
  if (needs_k_list) {
    if (cfg.k_list.empty()) throw ConfigError("coeffs.k_list: must be nonempty for sweeps");
    const bool forbid_zero =
        cfg.experiment == Experiment::neumann_sweep || cfg.experiment == Experiment::energy;
    if (forbid_zero)
      for (Real kv : cfg.k_list)
        if (kv == 0) throw ConfigError("coeffs.k_list: k = 0 not allowed for this experiment");
  }
  if (cfg.experiment == Experiment::k_independence)
    for (Real kv : cfg.k_list)
      if (kv == 0) throw ConfigError("coeffs.k_list: k = 0 not allowed for this experiment");
  if (cfg.experiment == Experiment::mms && cfg.divisions_list.empty())
    cfg.divisions_list = {8, 16, 32};
  if (cfg.experiment == Experiment::lift_check) {
    if (cfg.steps_list.empty()) cfg.steps_list = {64, 128, 256};
    for (int s : cfg.steps_list)
      if (s < 1) throw ConfigError("estimator.steps_list: steps must be >= 1");
    if (!(cfg.lift_T > 0)) throw ConfigError("estimator.T: must be > 0");
    if (cfg.k == 0 || cfg.k_field != "constant")
      throw ConfigError("coeffs.k: lift-check requires a nonzero constant k");
  }
  if (cfg.experiment == Experiment::truncation) {
    if (cfg.R_list.empty()) cfg.R_list = {1.0, 1.5, 2.0};
    if (!(cfg.spacing > 0)) throw ConfigError("estimator.spacing: must be > 0");
  }
  if (cfg.experiment == Experiment::oscillation) {
    if (!(cfg.q > 1.5)) throw ConfigError("estimator.q: requires q > 3/2");
    if (cfg.radii.empty()) cfg.radii = {0.25 * cfg.r, 0.5 * cfg.r, cfg.r};
    for (Real rr : cfg.radii) {
      if (!(rr > 0)) throw ConfigError("estimator.radii: must be positive");
      if (rr > cfg.r) throw ConfigError("estimator.radii: radius exceeds r_o = estimator.r");
    }
  }
  if (cfg.experiment == Experiment::solve && cfg.bc == BC::neumann && cfg.k == 0 &&
      cfg.k_field == "constant")
    throw ConfigError("coeffs.k: Neumann solve requires k != 0 (ill-posed otherwise)");
  if (cfg.experiment == Experiment::green_decay && cfg.bc == BC::neumann && cfg.k == 0 &&
      cfg.k_field == "constant")
    throw ConfigError("coeffs.k: Neumann function requires k != 0");

  return cfg;
}

}  // namespace ellik
