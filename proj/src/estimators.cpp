// SPDX-License-Identifier: Apache-2.0

#include "ellik/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace ellik {

namespace {

// Applies op(cell, quadrature point position, Q1 value, Q1 gradient) per point.
template <typename Op>
void for_each_quadrature_point(const BoxMesh& mesh, const VectorXc& nodal, Op&& op) {
  const Q1Basis basis(mesh.spacing());
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto nodes = mesh.cell_nodes(cell);
    const Vec3i m = mesh.cell_multi_index(cell);
    const Vec3 corner = mesh.origin() + mesh.spacing().cwiseProduct(m.cast<Real>());
    for (int q = 0; q < Q1Basis::n_qp; ++q) {
      Complex value(0, 0);
      Eigen::Vector3cd grad = Eigen::Vector3cd::Zero();
      for (int a = 0; a < 8; ++a) {
        const Complex ua = nodal[nodes[a]];
        value += ua * basis.value[q][a];
        for (int d = 0; d < 3; ++d) grad[d] += ua * basis.gradient[q][a][d];
      }
      op(basis.weight_detj, corner + basis.point_offset[q], value, grad);
    }
  }
}

}  // namespace

Real l2_norm_quadrature(const BoxMesh& mesh, const VectorXc& nodal) {
  Real acc = 0;
  for_each_quadrature_point(mesh, nodal,
                            [&](Real wd, const Vec3&, const Complex& v,
                                const Eigen::Vector3cd&) { acc += wd * std::norm(v); });
  return std::sqrt(acc);
}

Real grad_l2_norm_quadrature(const BoxMesh& mesh, const VectorXc& nodal) {
  Real acc = 0;
  for_each_quadrature_point(mesh, nodal,
                            [&](Real wd, const Vec3&, const Complex&,
                                const Eigen::Vector3cd& g) { acc += wd * g.squaredNorm(); });
  return std::sqrt(acc);
}

Real l2_error_quadrature(const BoxMesh& mesh, const VectorXc& nodal,
                         const std::function<Complex(const Vec3&)>& exact) {
  Real acc = 0;
  for_each_quadrature_point(mesh, nodal,
                            [&](Real wd, const Vec3& x, const Complex& v,
                                const Eigen::Vector3cd&) { acc += wd * std::norm(v - exact(x)); });
  return std::sqrt(acc);
}

std::vector<int> cells_in_ball(const BoxMesh& mesh, const Vec3& center, Real radius) {
  std::vector<int> cells;
  const Real r2 = radius * radius;
  for (int cell = 0; cell < mesh.cell_count(); ++cell)
    if ((mesh.cell_center(cell) - center).squaredNorm() <= r2) cells.push_back(cell);
  return cells;
}

Real lp_norm(const BoxMesh& mesh, const std::vector<Complex>& cell_data, Real p,
             const std::vector<int>& cells) {
  if (!(p >= 1)) throw Error("lp_norm: requires p >= 1");
  if (static_cast<int>(cell_data.size()) != mesh.cell_count())
    throw Error("lp_norm: cell data size mismatch");
  const Real vol = mesh.cell_volume();
  Real acc = 0;
  if (cells.empty()) {
    for (int cell = 0; cell < mesh.cell_count(); ++cell)
      acc += vol * std::pow(std::abs(cell_data[cell]), p);
  } else {
    for (int cell : cells) acc += vol * std::pow(std::abs(cell_data[cell]), p);
  }
  return std::pow(acc, 1.0 / p);
}

Real lp_norm_field(const BoxMesh& mesh, const VectorXc& nodal, Real p,
                   const std::vector<int>& cells) {
  std::vector<Complex> centered(mesh.cell_count());
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto nodes = mesh.cell_nodes(cell);
    Complex s(0, 0);
    for (int a = 0; a < 8; ++a) s += nodal[nodes[a]];
    centered[cell] = s / 8.0;
  }
  return lp_norm(mesh, centered, p, cells);
}

Real holder_seminorm(const ComplexField& field, const std::vector<int>& region, Real alpha) {
  if (!(alpha > 0 && alpha < 1)) throw Error("holder_seminorm: requires alpha in (0,1)");
  if (region.size() < 2) throw Error("holder_seminorm: region needs at least 2 nodes");
  const BoxMesh& mesh = *field.mesh;
  const Real h = mesh.max_spacing() * (1.0 - 1e-12);
  std::vector<Vec3> pos(region.size());
  for (std::size_t i = 0; i < region.size(); ++i) pos[i] = mesh.node_position(region[i]);
  Real best = 0;
  bool any = false;
  for (std::size_t i = 0; i < region.size(); ++i)
    for (std::size_t j = i + 1; j < region.size(); ++j) {
      const Real d = (pos[i] - pos[j]).norm();
      if (d < h) continue;
      any = true;
      const Real q =
          std::abs(field.values[region[i]] - field.values[region[j]]) / std::pow(d, alpha);
      best = std::max(best, q);
    }
  if (!any) throw Error("holder_seminorm: no admissible pairs separated by the grid spacing");
  return best;
}

namespace {

struct SolvedField {
  ComplexField field;
  SolveReport report;
};

SolvedField solve_with_load(const BoxMesh& mesh, const CoefficientSet& coeffs,
                            const std::vector<Complex>& f, BC bc, const SolverConfig& config) {
  const ComplexSparseMatrix A = assemble_form(mesh, coeffs, bc);
  const VectorXc rhs = assemble_volume_load(mesh, f, bc);
  auto [x, report] = solve_bicgstab(A, rhs, config);
  if (!report.converged)
    throw Error("estimator solve did not converge (residual " +
                std::to_string(report.relative_residual) + ")");
  if (bc == BC::dirichlet) enforce_dirichlet_zeros(mesh, x);
  return SolvedField{ComplexField{std::move(x), &mesh, bc}, report};
}

Real representative_k(const CoefficientSet& coeffs) {
  return coeffs.k_is_constant ? coeffs.constant_k() : std::numeric_limits<Real>::quiet_NaN();
}

}  // namespace

EstimateReport interior_constant(const BoxMesh& mesh, const CoefficientSet& coeffs,
                                 const std::vector<Complex>& f, const Vec3& x0, Real r, Real alpha,
                                 Real p, const SolverConfig& config) {
  if (!(p > 1.5)) throw Error("interior_constant: requires p > n/2 = 3/2");
  // The closed discrete ball must consist of active interior nodes.
  for (int node : ball_nodes(mesh, x0, r))
    if (mesh.is_boundary_node(node))
      throw Error("interior_constant: B_r(x0) touches the boundary; not an interior ball");
  {
    // Detect geometric ball nodes missing from the active set.
    const Vec3i dims = mesh.node_grid_dims();
    for (int gz = 0; gz < dims.z(); ++gz)
      for (int gy = 0; gy < dims.y(); ++gy)
        for (int gx = 0; gx < dims.x(); ++gx) {
          const Vec3 pos = mesh.origin() + mesh.spacing().cwiseProduct(Vec3(gx, gy, gz));
          if ((pos - x0).norm() > r) continue;
          if (mesh.active_node_of_grid(gx + dims.x() * (gy + dims.y() * gz)) < 0)
            throw Error("interior_constant: B_r(x0) leaves the active domain");
        }
  }

  const SolvedField sol = solve_with_load(mesh, coeffs, f, BC::dirichlet, config);

  EstimateReport rep;
  rep.center = x0;
  rep.r = r;
  rep.alpha = alpha;
  rep.p = p;
  rep.k = representative_k(coeffs);
  rep.h = mesh.max_spacing();
  rep.iterations = sol.report.iterations;
  rep.residual = sol.report.relative_residual;

  const std::vector<int> cells = cells_in_ball(mesh, x0, r);
  rep.l2_u = lp_norm_field(mesh, sol.field.values, 2.0, cells);
  rep.lp_f = lp_norm(mesh, f, p, cells);
  const Real denom = std::pow(r, -alpha) *
                     (std::pow(r, -1.5) * rep.l2_u + std::pow(r, 2.0 - 3.0 / p) * rep.lp_f);
  if (denom == 0)
    throw Error("interior_constant: undefined constant (u and f both vanish on the ball)");

  const std::vector<int> half_ball = ball_nodes(mesh, x0, 0.5 * r);
  rep.holder = holder_seminorm(sol.field, half_ball, alpha);
  for (int node : half_ball) rep.sup_norm = std::max(rep.sup_norm, std::abs(sol.field.values[node]));
  rep.c_est = rep.holder / denom;
  return rep;
}

EstimateReport boundary_sup_constant(const BoxMesh& mesh, const CoefficientSet& coeffs,
                                     const std::vector<Complex>& f, const Vec3& x0, Real r, Real p,
                                     BC bc, const SolverConfig& config) {
  if (!(p > 1.5)) throw Error("boundary_sup_constant: requires p > n/2 = 3/2");
  const Real diam = mesh.extent().norm();
  if (!(r > 0 && r < diam)) throw Error("boundary_sup_constant: requires 0 < r < diam(domain)");
  {
    const int node = mesh.node_at(x0);
    if (node < 0 || !mesh.is_boundary_node(node))
      throw Error("boundary_sup_constant: x0 is not a boundary node");
  }

  const SolvedField sol = solve_with_load(mesh, coeffs, f, bc, config);

  EstimateReport rep;
  rep.center = x0;
  rep.r = r;
  rep.alpha = 0;
  rep.p = p;
  rep.k = representative_k(coeffs);
  rep.h = mesh.max_spacing();
  rep.iterations = sol.report.iterations;
  rep.residual = sol.report.relative_residual;

  for (int node : ball_nodes(mesh, x0, 0.5 * r))
    rep.sup_norm = std::max(rep.sup_norm, std::abs(sol.field.values[node]));
  const std::vector<int> cells = cells_in_ball(mesh, x0, r);
  rep.l2_u = lp_norm_field(mesh, sol.field.values, 2.0, cells);
  rep.lp_f = lp_norm(mesh, f, p, cells);

  const Real denom = std::pow(r, -1.5) * rep.l2_u + std::pow(r, 2.0 - 3.0 / p) * rep.lp_f;
  if (denom == 0)
    throw Error("boundary_sup_constant: undefined constant (u and f both vanish on the region)");
  rep.c_est = rep.sup_norm / denom;
  return rep;
}

EnergyReport energy_check(const BoxMesh& mesh, const CoefficientSet& coeffs,
                          const std::vector<Complex>& f, const SolverConfig& config) {
  EnergyReport rep;
  rep.nu = verify_ellipticity(coeffs, mesh);
  rep.k = coeffs.constant_k();
  rep.f_l65 = lp_norm(mesh, f, 6.0 / 5.0);
  if (rep.f_l65 == 0) {
    rep.trivial = true;
    rep.ratio_grad = rep.ratio_mass = std::numeric_limits<Real>::quiet_NaN();
    return rep;
  }
  const SolvedField sol = solve_with_load(mesh, coeffs, f, BC::dirichlet, config);
  rep.grad_l2 = grad_l2_norm_quadrature(mesh, sol.field.values);
  rep.u_l2 = l2_norm_quadrature(mesh, sol.field.values);
  rep.ratio_grad = rep.grad_l2 * rep.nu / rep.f_l65;
  rep.ratio_mass = std::sqrt(std::abs(rep.k)) * rep.u_l2 / rep.f_l65;
  rep.iterations = sol.report.iterations;
  rep.residual = sol.report.relative_residual;
  return rep;
}

Real parabolic_lift_check(const BoxMesh& mesh, const CoefficientSet& coeffs,
                          const std::vector<Complex>& f, Real T, int steps,
                          const SolverConfig& config) {
  if (steps < 1) throw Error("parabolic_lift_check: steps must be >= 1");
  if (!coeffs.k_is_constant || coeffs.constant_k() == 0)
    throw Error("parabolic_lift_check: requires a nonzero constant k");
  const Real k = coeffs.constant_k();

  const SolvedField elliptic = solve_with_load(mesh, coeffs, f, BC::dirichlet, config);
  const VectorXc& u = elliptic.field.values;
  const Real u_norm = l2_norm_quadrature(mesh, u);
  if (u_norm == 0) return 0;  // trivial data marches exactly

  CoefficientSet stiffness_only = coeffs;
  stiffness_only.k.assign(mesh.cell_count(), 0.0);
  stiffness_only.k_is_constant = true;
  const ComplexSparseMatrix K = assemble_form(mesh, stiffness_only, BC::dirichlet);
  const ComplexSparseMatrix M = assemble_mass(mesh, BC::dirichlet);
  const Real dt = T / steps;
  const ComplexSparseMatrix A_step = add_scaled(M, Complex(1, 0), K, Complex(dt, 0));
  const VectorXc load = assemble_volume_load(mesh, f, BC::dirichlet);

  SolverConfig step_config = config;
  step_config.tol = std::min(config.tol, 1e-12);

  VectorXc v = u;
  for (int m = 1; m <= steps; ++m) {
    const Real t = m * dt;
    const VectorXc rhs = M.apply(v) + (dt * std::exp(Complex(0, k * t))) * load;
    auto [next, report] = solve_bicgstab(A_step, rhs, step_config);
    if (!report.converged)
      throw Error("parabolic_lift_check: time step solve did not converge at step " +
                  std::to_string(m));
    enforce_dirichlet_zeros(mesh, next);
    v = std::move(next);
  }
  const VectorXc diff = v - std::exp(Complex(0, k * T)) * u;
  return l2_norm_quadrature(mesh, diff) / u_norm;
}

std::vector<MmsRow> mms_convergence(const std::function<Complex(const Vec3&)>& exact,
                                    const std::function<Complex(const Vec3&)>& f,
                                    const PatternSpec& gamma_pattern, Real k,
                                    const std::vector<int>& division_list,
                                    const SolverConfig& config) {
  std::vector<MmsRow> rows;
  for (int divisions : division_list) {
    const BoxMesh mesh =
        build_box_mesh(Vec3::Zero(), Vec3::Ones(), Vec3i::Constant(divisions));
    const CoefficientSet coeffs = pattern(gamma_pattern, mesh, k);
    const ComplexSparseMatrix A = assemble_form(mesh, coeffs, BC::dirichlet);
    const VectorXc rhs = assemble_volume_load(mesh, f, BC::dirichlet);
    auto [x, report] = solve_bicgstab(A, rhs, config);
    if (!report.converged)
      throw Error("mms_convergence: solver did not converge at divisions " +
                  std::to_string(divisions));
    enforce_dirichlet_zeros(mesh, x);
    MmsRow row;
    row.divisions = divisions;
    row.h = mesh.max_spacing();
    row.l2_error = l2_error_quadrature(mesh, x, exact);
    if (!rows.empty() && row.l2_error > 0)
      row.rate = std::log2(rows.back().l2_error / row.l2_error) /
                 std::log2(rows.back().h / row.h);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ellik
