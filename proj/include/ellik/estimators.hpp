// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_ESTIMATORS_HPP
#define ELLIK_ESTIMATORS_HPP

#include <functional>
#include <vector>

#include "ellik/assembly.hpp"
#include "ellik/coeffs.hpp"
#include "ellik/linsolve.hpp"
#include "ellik/mesh.hpp"

namespace ellik {

/// Quadrature L2 norm of a Q1 nodal field (2x2x2 Gauss, exact for Q1 products).
Real l2_norm_quadrature(const BoxMesh& mesh, const VectorXc& nodal);

/// Quadrature L2 norm of the Q1 gradient of a nodal field.
Real grad_l2_norm_quadrature(const BoxMesh& mesh, const VectorXc& nodal);

/// Quadrature L2 norm of (u_h - exact), the true finite element error.
Real l2_error_quadrature(const BoxMesh& mesh, const VectorXc& nodal,
                         const std::function<Complex(const Vec3&)>& exact);

/// Active cells whose center lies in the closed ball.
std::vector<int> cells_in_ball(const BoxMesh& mesh, const Vec3& center, Real radius);

/// Volume-weighted discrete p-norm of per-cell data over a cell subset
/// (all active cells when empty): ( sum vol |w_c|^p )^(1/p).
Real lp_norm(const BoxMesh& mesh, const std::vector<Complex>& cell_data, Real p,
             const std::vector<int>& cells = {});

/// Same, with a nodal field sampled at cell centers (the mean of its 8 nodes).
Real lp_norm_field(const BoxMesh& mesh, const VectorXc& nodal, Real p,
                   const std::vector<int>& cells = {});

/// Discrete Hoelder seminorm over a node region: max over pairs of
/// |u(x)-u(y)| / |x-y|^alpha, restricted to pairs separated by at least the
/// max grid spacing (sub-grid distances carry no information). Requires
/// alpha in (0,1) and at least one admissible pair.
Real holder_seminorm(const ComplexField& field, const std::vector<int>& region, Real alpha);

/// Measured data for one Theorem-1-style constant.
struct EstimateReport {
  Vec3 center = Vec3::Zero();
  Real r = 0;
  Real alpha = 0;             // 0 for sup-norm (boundary) estimates
  Real p = 2;
  Real holder = 0;            // [u]_{alpha; B_{r/2}} (interior case)
  Real sup_norm = 0;          // max |u| over the r/2 region
  Real l2_u = 0;              // ||u||_{L2(ball r)}
  Real lp_f = 0;              // ||f||_{Lp(ball r)}
  Real c_est = 0;
  Real k = 0;
  Real h = 0;
  int iterations = 0;
  Real residual = 0;
};

/// Interior Hoelder constant: solves the Dirichlet problem with per-cell load
/// f, then C_est = [u]_{alpha;B_{r/2}} / ( r^{-alpha} ( r^{-3/2} ||u||_{L2(B_r)}
/// + r^{2-3/p} ||f||_{Lp(B_r)} ) ). The closed ball B_r(x0) must consist of
/// active interior nodes. Throws when the denominator degenerates (u and f
/// both vanish on the ball).
EstimateReport interior_constant(const BoxMesh& mesh, const CoefficientSet& coeffs,
                                 const std::vector<Complex>& f, const Vec3& x0, Real r, Real alpha,
                                 Real p, const SolverConfig& config = {});

/// Boundary sup-norm constant at x0 on the boundary:
/// C_est = ||u||_{Linf(Omega_{r/2})} / ( r^{-3/2} ||u||_{L2(Omega_r)}
/// + r^{2-3/p} ||f||_{Lp(Omega_r)} ), with Omega_r = Omega intersect B_r(x0),
/// under Dirichlet or Neumann conditions.
EstimateReport boundary_sup_constant(const BoxMesh& mesh, const CoefficientSet& coeffs,
                                     const std::vector<Complex>& f, const Vec3& x0, Real r, Real p,
                                     BC bc, const SolverConfig& config = {});

struct EnergyReport {
  Real grad_l2 = 0;   // ||grad u_h||_{L2}
  Real u_l2 = 0;      // ||u_h||_{L2}
  Real f_l65 = 0;     // ||f||_{L^{6/5}}
  Real nu = 0;
  Real k = 0;
  Real ratio_grad = 0;  // R1 = nu ||grad u|| / ||f||
  Real ratio_mass = 0;  // R2 = sqrt|k| ||u|| / ||f||
  bool trivial = false;  // f = 0: ratios undefined
  int iterations = 0;
  Real residual = 0;
};

/// Dirichlet energy identities: solves Lu = f and reports the ratios that the
/// Lax-Milgram bounds control.
EnergyReport energy_check(const BoxMesh& mesh, const CoefficientSet& coeffs,
                          const std::vector<Complex>& f, const SolverConfig& config = {});

/// Parabolic lifting cross-check: with constant k and Dirichlet data, the
/// semi-discrete solution of v_t - div(gamma grad v) = e^{ikt} f starting from
/// the elliptic solution u_h is exactly e^{ikt} u_h; an implicit Euler march
/// (source at the step end) should reproduce it to first order in dt.
/// Returns ||v(T) - e^{ikT} u_h||_{L2} / ||u_h||_{L2}.
Real parabolic_lift_check(const BoxMesh& mesh, const CoefficientSet& coeffs,
                          const std::vector<Complex>& f, Real T, int steps,
                          const SolverConfig& config = {});

struct MmsRow {
  int divisions = 0;
  Real h = 0;
  Real l2_error = 0;
  Real rate = 0;  // log2(e_{2h} / e_h), 0 for the first row
};

/// Method of manufactured solutions on the unit cube: for each division count,
/// solves the Dirichlet problem with load f and measures the quadrature L2
/// error against the exact solution; observed rates between successive meshes.
std::vector<MmsRow> mms_convergence(const std::function<Complex(const Vec3&)>& exact,
                                    const std::function<Complex(const Vec3&)>& f,
                                    const PatternSpec& gamma_pattern, Real k,
                                    const std::vector<int>& division_list,
                                    const SolverConfig& config = {});

}  // namespace ellik

#endif  // ELLIK_ESTIMATORS_HPP
