// SPDX-License-Identifier: Apache-2.0

#include "ellik/greens.hpp"

#include <algorithm>
#include <cmath>

namespace ellik {

GreenSolution dirichlet_green(const BoxMesh& mesh, const CoefficientSet& coeffs, int y,
                              const SolverConfig& config) {
  const ComplexSparseMatrix A = assemble_form(mesh, coeffs, BC::dirichlet);
  const VectorXc rhs = assemble_point_load(mesh, y, BC::dirichlet);
  auto [x, report] = solve_bicgstab(A, rhs, config);
  if (!report.converged)
    throw Error("dirichlet_green: solver did not converge (residual " +
                std::to_string(report.relative_residual) + ")");
  enforce_dirichlet_zeros(mesh, x);
  return GreenSolution{ComplexField{std::move(x), &mesh, BC::dirichlet}, report};
}

GreenSolution neumann_function(const BoxMesh& mesh, const CoefficientSet& coeffs, int y,
                               const SolverConfig& config) {
  if (coeffs.k_all_zero())
    throw Error("neumann_function: k = 0 makes the Neumann problem ill-posed");
  const ComplexSparseMatrix A = assemble_form(mesh, coeffs, BC::neumann);
  const VectorXc rhs = assemble_point_load(mesh, y, BC::neumann);
  auto [x, report] = solve_bicgstab(A, rhs, config);
  if (!report.converged)
    throw Error("neumann_function: solver did not converge (residual " +
                std::to_string(report.relative_residual) + ")");
  return GreenSolution{ComplexField{std::move(x), &mesh, BC::neumann}, report};
}

namespace {

// Nodes within two grid steps (Chebyshev distance in index space) of a
// boundary node; used to drop forced Dirichlet zeros from log fits.
std::vector<std::uint8_t> near_boundary_mask(const BoxMesh& mesh) {
  const int n = mesh.node_count();
  std::vector<std::uint8_t> mask(n, 0);
  const Vec3i dims = mesh.node_grid_dims();
  for (int i = 0; i < n; ++i) {
    if (!mesh.is_boundary_node(i)) continue;
    const Vec3i m = mesh.node_multi_index(i);
    for (int dz = -2; dz <= 2; ++dz)
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) {
          const Vec3i nb = m + Vec3i(dx, dy, dz);
          if ((nb.array() < 0).any() || (nb.array() >= dims.array()).any()) continue;
          const int a = mesh.active_node_of_grid(nb.x() + dims.x() * (nb.y() + dims.y() * nb.z()));
          if (a >= 0) mask[a] = 1;
        }
  }
  return mask;
}

}  // namespace

DecayFit decay_fit(const ComplexField& field, int y, Real r_min, Real r_max) {
  return decay_fit(field, y, r_min, r_max, field.bc == BC::dirichlet);
}

DecayFit decay_fit(const ComplexField& field, int y, Real r_min, Real r_max,
                   bool exclude_near_boundary) {
  const BoxMesh& mesh = *field.mesh;
  if (!(r_min >= 2.0 * mesh.max_spacing()))
    throw Error("decay_fit: r_min must be at least twice the max spacing");
  if (!(r_max <= 0.25 * mesh.min_extent()))
    throw Error("decay_fit: r_max must be at most a quarter of the min extent");
  if (!(r_min < r_max)) throw Error("decay_fit: empty window");

  std::vector<std::uint8_t> skip;
  if (exclude_near_boundary) skip = near_boundary_mask(mesh);

  const Vec3 pole = mesh.node_position(y);
  std::vector<Real> log_r, log_u;
  Real sup_c = 0;
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (!skip.empty() && skip[i]) continue;
    const Real r = (mesh.node_position(i) - pole).norm();
    if (r < r_min || r > r_max) continue;
    const Real mag = std::abs(field.values[i]);
    if (mag <= 0) continue;  // log-degenerate sample
    log_r.push_back(std::log(r));
    log_u.push_back(std::log(mag));
    sup_c = std::max(sup_c, mag * r);
  }

  DecayFit fit;
  fit.pole = y;
  fit.r_min = r_min;
  fit.r_max = r_max;
  fit.sample_count = static_cast<int>(log_r.size());
  if (fit.sample_count < 10)
    throw Error("decay_fit: fewer than 10 samples in the window (got " +
                std::to_string(fit.sample_count) + "); fit refused");

  const Real n = static_cast<Real>(fit.sample_count);
  Real mean_x = 0, mean_y = 0;
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    mean_x += log_r[i];
    mean_y += log_u[i];
  }
  mean_x /= n;
  mean_y /= n;
  Real sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    const Real dx = log_r[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (log_u[i] - mean_y);
  }
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.fit_constant = std::exp(fit.intercept);
  fit.sup_constant = sup_c;
  Real ss = 0;
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    const Real e = log_u[i] - (fit.intercept + fit.slope * log_r[i]);
    ss += e * e;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

std::pair<Real, Real> default_fit_window(const BoxMesh& mesh) {
  const Real r_max = 0.25 * mesh.min_extent();
  Real r_min = 4.0 * mesh.max_spacing();
  if (r_min >= r_max) r_min = 2.0 * mesh.max_spacing();  // coarse-mesh fallback
  return {r_min, r_max};
}

std::vector<NeumannSweepRow> neumann_k_sweep(const BoxMesh& mesh, const CoefficientSet& coeffs,
                                             int y, std::vector<Real> k_values,
                                             const SolverConfig& config, Real r_min, Real r_max) {
  std::sort(k_values.begin(), k_values.end());
  const auto fallback = default_fit_window(mesh);
  if (r_max <= 0) r_max = fallback.second;
  if (r_min <= 0) r_min = fallback.first;
  if (r_min >= r_max)
    throw Error("neumann_k_sweep: empty window (mesh too coarse for the radial cutoffs)");
  const Vec3 pole = mesh.node_position(y);
  std::vector<NeumannSweepRow> rows;
  for (Real k : k_values) {
    if (k == 0) throw Error("neumann_k_sweep: k = 0 not allowed");
    const GreenSolution sol = neumann_function(mesh, coeffs.with_constant_k(k), y, config);
    NeumannSweepRow row;
    row.k = k;
    row.solve = sol.solve;
    for (int i = 0; i < mesh.node_count(); ++i) {
      const Real r = (mesh.node_position(i) - pole).norm();
      if (r < r_min || r > r_max) continue;
      row.sup_constant = std::max(row.sup_constant, std::abs(sol.field.values[i]) * r);
    }
    row.envelope_ratio = row.sup_constant / std::max(1.0, 1.0 / std::sqrt(std::abs(k)));
    rows.push_back(row);
  }
  return rows;
}

TruncationStudy truncation_study(const std::function<Mat3(const Vec3&)>& gamma_of, Real k,
                                 const Vec3& probe_offset, const std::vector<Real>& half_widths,
                                 Real spacing, const SolverConfig& config, int node_cap) {
  if (!(spacing > 0)) throw Error("truncation_study: spacing must be > 0");
  TruncationStudy study;
  study.spacing = spacing;
  study.pole = Vec3::Zero();
  for (int d = 0; d < 3; ++d)
    study.probe[d] = std::round(probe_offset[d] / spacing) * spacing;

  std::vector<Real> widths = half_widths;
  std::sort(widths.begin(), widths.end());

  bool capped = false;
  Complex prev(0, 0);
  bool have_prev = false;
  for (Real raw_r : widths) {
    const int half_cells = std::max(1, static_cast<int>(std::round(raw_r / spacing)));
    const Real R = half_cells * spacing;
    TruncationRow row;
    row.half_width = R;
    const long nodes_estimate = static_cast<long>(2 * half_cells + 1) * (2 * half_cells + 1) *
                                (2 * half_cells + 1);
    if (capped || nodes_estimate > node_cap) {
      capped = true;
      study.rows.push_back(row);
      continue;
    }
    const BoxMesh mesh = build_box_mesh(Vec3::Constant(-R), Vec3::Constant(2 * R),
                                        Vec3i::Constant(2 * half_cells));
    CoefficientSet coeffs;
    coeffs.gamma.resize(mesh.cell_count());
    for (int cell = 0; cell < mesh.cell_count(); ++cell)
      coeffs.gamma[cell] = gamma_of(mesh.cell_center(cell));
    coeffs.k = constant_k_field(mesh, k);
    verify_ellipticity(coeffs, mesh);

    const int pole_node = mesh.node_at(study.pole);
    const int probe_node = mesh.node_at(study.probe);
    if (pole_node < 0 || probe_node < 0)
      throw Error("truncation_study: pole or probe not on the lattice of the smallest box");
    const GreenSolution sol = dirichlet_green(mesh, coeffs, pole_node, config);
    row.probe_value = sol.field.values[probe_node];
    row.solved = true;
    row.solve = sol.solve;
    if (have_prev) row.diff_prev = std::abs(row.probe_value - prev);
    prev = row.probe_value;
    have_prev = true;
    study.rows.push_back(row);
  }
  return study;
}

}  // namespace ellik
