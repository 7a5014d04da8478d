// SPDX-License-Identifier: Apache-2.0

#include "ellik/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ellik/estimators.hpp"
#include "ellik/greens.hpp"
#include "ellik/io.hpp"

namespace ellik {

namespace fs = std::filesystem;

namespace {

std::ofstream open_artifact(const std::string& dir, const std::string& file,
                            std::vector<std::string>& artifacts) {
  const fs::path path = fs::path(dir) / file;
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path.string());
  artifacts.push_back(path.string());
  return out;
}

void provenance(CsvWriter& csv, const ExperimentConfig& cfg, const std::string& schema, Real h,
                Real nu, Real k) {
  csv.comment("schema", schema);
  csv.comment("config_hash", cfg.config_hash);
  csv.comment("h_max", format_real(h));
  csv.comment("nu", format_real(nu));
  csv.comment("k", format_real(k));
}

void write_field_vtk(const std::string& dir, const std::string& stem, const BoxMesh& mesh,
                     const VectorXc& values, std::vector<std::string>& artifacts) {
  const auto component = [&](const std::string& suffix, auto&& fn) {
    VectorXr data(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) data[i] = fn(values[i]);
    auto out = open_artifact(dir, stem + "_" + suffix + ".vtk", artifacts);
    write_vtk_structured_points(out, mesh, stem + "_" + suffix, data);
  };
  component("abs", [](const Complex& v) { return std::abs(v); });
  component("re", [](const Complex& v) { return v.real(); });
  component("im", [](const Complex& v) { return v.imag(); });
}

std::vector<Complex> constant_load(const BoxMesh& mesh, Complex f) {
  return std::vector<Complex>(mesh.cell_count(), f);
}

void run_solve(const ExperimentConfig& cfg, const std::string& dir,
               std::vector<std::string>& artifacts) {
  const BoxMesh mesh = cfg.make_mesh();
  const CoefficientSet coeffs = cfg.make_coeffs(mesh);
  const Real nu = verify_ellipticity(coeffs, mesh);
  const ComplexSparseMatrix A = assemble_form(mesh, coeffs, cfg.bc);
  const VectorXc rhs = assemble_volume_load(mesh, constant_load(mesh, cfg.f), cfg.bc);
  auto [x, report] = solve_bicgstab(A, rhs, cfg.solver);
  if (!report.converged) throw Error("solve: solver did not converge");
  if (cfg.bc == BC::dirichlet) enforce_dirichlet_zeros(mesh, x);

  if (cfg.write_csv) {
    auto out = open_artifact(dir, "solve.csv", artifacts);
    CsvWriter csv(out);
    provenance(csv, cfg, "ellik-solve-v1", mesh.max_spacing(), nu,
               coeffs.k_is_constant ? coeffs.constant_k() : std::nan(""));
    csv.comment("iterations", CsvWriter::cell(report.iterations));
    csv.comment("residual", format_real(report.relative_residual));
    csv.header({"node", "x", "y", "z", "re", "im"});
    for (int i = 0; i < mesh.node_count(); ++i) {
      const Vec3 pos = mesh.node_position(i);
      csv.row({CsvWriter::cell(i), format_real(pos.x()), format_real(pos.y()),
               format_real(pos.z()), format_real(x[i].real()), format_real(x[i].imag())});
    }
  }
  if (cfg.write_vtk) write_field_vtk(dir, "solve", mesh, x, artifacts);
}

void run_mms(const ExperimentConfig& cfg, const std::string& dir,
             std::vector<std::string>& artifacts) {
  if (cfg.gamma_pattern.kind != PatternSpec::Kind::identity)
    throw Error("mms: the manufactured forcing assumes gamma = I (coeffs.pattern = identity)");
  const Real k = cfg.k;
  const auto exact = [](const Vec3& x) {
    return Complex(1.0, 0.5) * std::sin(kPi * x.x()) * std::sin(kPi * x.y()) *
           std::sin(kPi * x.z());
  };
  const auto forcing = [k, exact](const Vec3& x) {
    return Complex(3.0 * kPi * kPi, k) * exact(x);
  };
  const auto rows = mms_convergence(exact, forcing, PatternSpec::identity(), k,
                                    cfg.divisions_list, cfg.solver);
  auto out = open_artifact(dir, "mms.csv", artifacts);
  CsvWriter csv(out);
  provenance(csv, cfg, "ellik-mms-v1", rows.empty() ? 0.0 : rows.back().h, 1.0, k);
  csv.header({"divisions", "h", "l2_error", "rate"});
  for (const auto& row : rows)
    csv.row({CsvWriter::cell(row.divisions), format_real(row.h), format_real(row.l2_error),
             format_real(row.rate)});
}

void run_green_decay(const ExperimentConfig& cfg, const std::string& dir,
                     std::vector<std::string>& artifacts) {
  const BoxMesh mesh = cfg.make_mesh();
  const CoefficientSet coeffs = cfg.make_coeffs(mesh);
  const Real nu = verify_ellipticity(coeffs, mesh);
  const int pole = mesh.node_at(cfg.x0);
  if (pole < 0) throw Error("green-decay: estimator.x0 is not a mesh node");
  const GreenSolution sol = cfg.bc == BC::dirichlet
                                ? dirichlet_green(mesh, coeffs, pole, cfg.solver)
                                : neumann_function(mesh, coeffs, pole, cfg.solver);
  auto [w_min, w_max] = default_fit_window(mesh);
  if (cfg.r_min > 0) w_min = cfg.r_min;
  if (cfg.r_max > 0) w_max = cfg.r_max;
  const DecayFit fit = decay_fit(sol.field, pole, w_min, w_max);

  auto out = open_artifact(dir, "green-decay.csv", artifacts);
  CsvWriter csv(out);
  provenance(csv, cfg, "ellik-green-decay-v1", mesh.max_spacing(), nu,
             coeffs.k_is_constant ? coeffs.constant_k() : std::nan(""));
  csv.comment("slope", format_real(fit.slope));
  csv.comment("fit_constant", format_real(fit.fit_constant));
  csv.comment("sup_constant", format_real(fit.sup_constant));
  csv.comment("samples", CsvWriter::cell(fit.sample_count));
  csv.comment("window", format_real(w_min) + " " + format_real(w_max));
  csv.comment("iterations", CsvWriter::cell(sol.solve.iterations));
  csv.header({"r", "abs_g", "arg_g"});

  const Vec3 pole_pos = mesh.node_position(pole);
  std::vector<std::pair<Real, int>> samples;
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Real r = (mesh.node_position(i) - pole_pos).norm();
    if (r >= w_min && r <= w_max) samples.emplace_back(r, i);
  }
  std::sort(samples.begin(), samples.end());
  for (const auto& [r, i] : samples) {
    const Complex g = sol.field.values[i];
    csv.row({format_real(r), format_real(std::abs(g)), format_real(std::arg(g))});
  }
  if (cfg.write_vtk) write_field_vtk(dir, "green", mesh, sol.field.values, artifacts);
}

void run_neumann_sweep(const ExperimentConfig& cfg, const std::string& dir,
                       std::vector<std::string>& artifacts) {
  const BoxMesh mesh = cfg.make_mesh();
  const CoefficientSet coeffs = cfg.make_coeffs(mesh);
  const Real nu = verify_ellipticity(coeffs, mesh);
  const int pole = mesh.node_at(cfg.x0);
  if (pole < 0) throw Error("neumann-sweep: estimator.x0 is not a mesh node");
  const auto rows = neumann_k_sweep(mesh, coeffs, pole, cfg.k_list, cfg.solver);

  auto out = open_artifact(dir, "neumann-sweep.csv", artifacts);
  CsvWriter csv(out);
  provenance(csv, cfg, "ellik-neumann-sweep-v1", mesh.max_spacing(), nu,
             cfg.k_list.empty() ? 0.0 : cfg.k_list.front());
  csv.header({"k", "c_obs", "envelope_ratio", "iterations", "residual"});
  for (const auto& row : rows)
    csv.row({format_real(row.k), format_real(row.sup_constant), format_real(row.envelope_ratio),
             CsvWriter::cell(row.solve.iterations), format_real(row.solve.relative_residual)});
}

void run_k_independence(const ExperimentConfig& cfg, const std::string& dir,
                        std::vector<std::string>& artifacts) {
  const BoxMesh mesh = cfg.make_mesh();
  const CoefficientSet coeffs = cfg.make_coeffs(mesh);
  const Real nu = verify_ellipticity(coeffs, mesh);
  const std::vector<Complex> f = constant_load(mesh, cfg.f);

  std::vector<Real> ks = cfg.k_list;
  std::sort(ks.begin(), ks.end());
  std::vector<EstimateReport> reports;
  for (Real k : ks)
    reports.push_back(interior_constant(mesh, coeffs.with_constant_k(k), f, cfg.x0, cfg.r,
                                        cfg.alpha, cfg.p, cfg.solver));

  Real cmax = 0, cmin = std::numeric_limits<Real>::infinity();
  for (const auto& rep : reports) {
    cmax = std::max(cmax, rep.c_est);
    cmin = std::min(cmin, rep.c_est);
  }
  auto out = open_artifact(dir, "k-independence.csv", artifacts);
  CsvWriter csv(out);
  provenance(csv, cfg, "ellik-estimate-v1", mesh.max_spacing(), nu, ks.empty() ? 0.0 : ks.front());
  csv.comment("max_over_min", format_real(cmin > 0 ? cmax / cmin : std::nan("")));
  csv.header({"k", "r", "alpha", "p", "holder", "sup_norm", "l2_u", "lp_f", "c_est", "iterations",
              "residual"});
  for (const auto& rep : reports)
    csv.row({format_real(rep.k), format_real(rep.r), format_real(rep.alpha), format_real(rep.p),
             format_real(rep.holder), format_real(rep.sup_norm), format_real(rep.l2_u),
             format_real(rep.lp_f), format_real(rep.c_est), CsvWriter::cell(rep.iterations),
             format_real(rep.residual)});
}

void run_energy(const ExperimentConfig& cfg, const std::string& dir,
                std::vector<std::string>& artifacts) {
  const BoxMesh mesh = cfg.make_mesh();
  const CoefficientSet coeffs = cfg.make_coeffs(mesh);
  const Real nu = verify_ellipticity(coeffs, mesh);
  const std::vector<Complex> f = constant_load(mesh, cfg.f);

  std::vector<Real> ks = cfg.k_list;
  std::sort(ks.begin(), ks.end());
  auto out = open_artifact(dir, "energy.csv", artifacts);
  CsvWriter csv(out);
  provenance(csv, cfg, "ellik-energy-v1", mesh.max_spacing(), nu, ks.empty() ? 0.0 : ks.front());
  csv.header({"k", "nu", "grad_l2", "u_l2", "f_l65", "ratio_grad", "ratio_mass", "iterations",
              "residual"});
  for (Real k : ks) {
    const EnergyReport rep = energy_check(mesh, coeffs.with_constant_k(k), f, cfg.solver);
    csv.row({format_real(k), format_real(rep.nu), format_real(rep.grad_l2), format_real(rep.u_l2),
             format_real(rep.f_l65), format_real(rep.ratio_grad), format_real(rep.ratio_mass),
             CsvWriter::cell(rep.iterations), format_real(rep.residual)});
  }
}

void run_lift_check(const ExperimentConfig& cfg, const std::string& dir,
                    std::vector<std::string>& artifacts) {
  const BoxMesh mesh = cfg.make_mesh();
  const CoefficientSet coeffs = cfg.make_coeffs(mesh);
  const Real nu = verify_ellipticity(coeffs, mesh);
  const std::vector<Complex> f = constant_load(mesh, cfg.f);

  std::vector<int> steps = cfg.steps_list;
  std::sort(steps.begin(), steps.end());
  auto out = open_artifact(dir, "lift-check.csv", artifacts);
  CsvWriter csv(out);
  provenance(csv, cfg, "ellik-lift-v1", mesh.max_spacing(), nu, cfg.k);
  csv.comment("T", format_real(cfg.lift_T));
  csv.header({"steps", "discrepancy", "ratio_prev"});
  Real prev = 0;
  bool have_prev = false;
  for (int s : steps) {
    const Real d = parabolic_lift_check(mesh, coeffs, f, cfg.lift_T, s, cfg.solver);
    const Real ratio = have_prev && d > 0 ? prev / d : 0.0;
    csv.row({CsvWriter::cell(s), format_real(d), format_real(ratio)});
    prev = d;
    have_prev = true;
  }
}

void run_truncation(const ExperimentConfig& cfg, const std::string& dir,
                    std::vector<std::string>& artifacts) {
  const PatternSpec spec = cfg.gamma_pattern;
  const auto gamma_of = [spec](const Vec3& x) { return pattern_at(spec, x); };
  const TruncationStudy study =
      truncation_study(gamma_of, cfg.k, cfg.probe, cfg.R_list, cfg.spacing, cfg.solver);

  auto out = open_artifact(dir, "truncation.csv", artifacts);
  CsvWriter csv(out);
  provenance(csv, cfg, "ellik-truncation-v1", cfg.spacing, 0.0, cfg.k);
  csv.comment("probe", format_real(study.probe.x()) + " " + format_real(study.probe.y()) + " " +
                           format_real(study.probe.z()));
  csv.header({"R", "probe_re", "probe_im", "diff_prev", "solved", "iterations"});
  for (const auto& row : study.rows)
    csv.row({format_real(row.half_width), format_real(row.probe_value.real()),
             format_real(row.probe_value.imag()), format_real(row.diff_prev),
             CsvWriter::cell(row.solved ? 1 : 0), CsvWriter::cell(row.solve.iterations)});
}

void run_oscillation(const ExperimentConfig& cfg, const std::string& dir,
                     std::vector<std::string>& artifacts) {
  const BoxMesh mesh = cfg.make_mesh();
  const CoefficientSet coeffs = cfg.make_coeffs(mesh);
  const OscillationReport report =
      oscillation_seminorm(coeffs.k, mesh, cfg.r, cfg.q, {cfg.x0}, cfg.radii);

  auto out = open_artifact(dir, "oscillation.csv", artifacts);
  CsvWriter csv(out);
  provenance(csv, cfg, "ellik-oscillation-v1", mesh.max_spacing(), 0.0, std::nan(""));
  csv.comment("kappa_o", format_real(report.kappa_o));
  csv.comment("q", format_real(report.q));
  csv.comment("r_o", format_real(report.r_o));
  csv.header({"cx", "cy", "cz", "radius", "k_mean", "value", "skipped"});
  for (const auto& s : report.table)
    csv.row({format_real(s.center.x()), format_real(s.center.y()), format_real(s.center.z()),
             format_real(s.radius), format_real(s.k_mean), format_real(s.value),
             CsvWriter::cell(s.skipped ? 1 : 0)});
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& config) {
  fs::path dir(config.output_dir);
  if (dir.is_relative()) {
    if (const char* root = std::getenv("ELLIK_OUTPUT_ROOT")) dir = fs::path(root) / dir;
  }
  return dir.string();
}

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
  const std::string dir = resolve_output_dir(config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());

  std::vector<std::string> artifacts;
  switch (config.experiment) {
    case Experiment::solve: run_solve(config, dir, artifacts); break;
    case Experiment::mms: run_mms(config, dir, artifacts); break;
    case Experiment::green_decay: run_green_decay(config, dir, artifacts); break;
    case Experiment::neumann_sweep: run_neumann_sweep(config, dir, artifacts); break;
    case Experiment::k_independence: run_k_independence(config, dir, artifacts); break;
    case Experiment::energy: run_energy(config, dir, artifacts); break;
    case Experiment::lift_check: run_lift_check(config, dir, artifacts); break;
    case Experiment::truncation: run_truncation(config, dir, artifacts); break;
    case Experiment::oscillation: run_oscillation(config, dir, artifacts); break;
  }
  return artifacts;
}

}  // namespace ellik
