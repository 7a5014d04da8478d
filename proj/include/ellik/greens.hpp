// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_GREENS_HPP
#define ELLIK_GREENS_HPP

#include <vector>

#include "ellik/assembly.hpp"
#include "ellik/coeffs.hpp"
#include "ellik/linsolve.hpp"
#include "ellik/mesh.hpp"

namespace ellik {

/// Least-squares fit of log|u(x)| against log|x-y| over a radial window,
/// plus the windowed supremum of |u(x)| |x-y|^(n-2), the constant actually
/// compared against the pointwise kernel bounds in three dimensions.
struct DecayFit {
  int pole = -1;
  Real r_min = 0, r_max = 0;
  Real slope = 0;
  Real intercept = 0;        // log C of the fit
  Real fit_constant = 0;     // exp(intercept)
  Real sup_constant = 0;     // max over window of |u| * r
  int sample_count = 0;
  Real residual_rms = 0;     // rms of log-residuals about the fit
};

struct GreenSolution {
  ComplexField field;
  SolveReport solve;
};

/// Discrete Dirichlet function G_h(.,y): solves the Dirichlet-eliminated
/// system with unit load at the interior node y. Boundary values are exact
/// zeros.
GreenSolution dirichlet_green(const BoxMesh& mesh, const CoefficientSet& coeffs, int y,
                              const SolverConfig& config = {});

/// Discrete Neumann function N_h(.,y): natural boundary condition, unit load
/// at node y. Requires k nonzero somewhere (ill-posed otherwise).
GreenSolution neumann_function(const BoxMesh& mesh, const CoefficientSet& coeffs, int y,
                               const SolverConfig& config = {});

/// Fits the radial decay of |field| about node y over [r_min, r_max].
/// When exclude_near_boundary is set (the Dirichlet default), nodes within
/// two grid steps of a boundary node are dropped so forced zeros cannot bias
/// the log fit. Requires r_min >= 2 * max spacing, r_max <= min extent / 4,
/// and at least 10 samples.
DecayFit decay_fit(const ComplexField& field, int y, Real r_min, Real r_max);
DecayFit decay_fit(const ComplexField& field, int y, Real r_min, Real r_max,
                   bool exclude_near_boundary);

/// Default fit window [4 h_max, min_extent / 4], relaxing the inner cutoff to
/// 2 h_max on meshes too coarse to fit the standard window.
std::pair<Real, Real> default_fit_window(const BoxMesh& mesh);

struct NeumannSweepRow {
  Real k = 0;
  Real sup_constant = 0;     // C_obs(k) = windowed sup of |N_h| |x-y|
  Real envelope_ratio = 0;   // C_obs(k) / max(1, |k|^{-1/2})
  SolveReport solve;
};

/// Runs neumann_function for each k and records the windowed bound constant
/// against the max(1, |k|^{-1/2}) envelope. Rows are returned sorted by k.
/// Window arguments of 0 select [4 h, L/4], falling back to [2 h, L/4] on
/// meshes too coarse for the standard cutoff; an empty window throws.
std::vector<NeumannSweepRow> neumann_k_sweep(const BoxMesh& mesh, const CoefficientSet& coeffs,
                                             int y, std::vector<Real> k_values,
                                             const SolverConfig& config = {}, Real r_min = 0,
                                             Real r_max = 0);

struct TruncationRow {
  Real half_width = 0;        // R of the box [-R, R]^3
  Complex probe_value{0, 0};  // G_h^{(R)}(x0, y)
  Real diff_prev = 0;         // |probe - previous probe|, 0 for the first row
  bool solved = false;        // false when the node cap stopped the study
  SolveReport solve;
};

struct TruncationStudy {
  std::vector<TruncationRow> rows;
  Vec3 pole = Vec3::Zero();
  Vec3 probe = Vec3::Zero();
  Real spacing = 0;
};

/// Domain-truncation study: Dirichlet solves on nested boxes [-R, R]^3 at
/// fixed spacing h, pole at the origin, probe at probe_offset (both snapped to
/// the h-lattice). gamma_of evaluates the coefficient pattern on all of R^3.
/// Boxes above node_cap nodes are reported unsolved.
TruncationStudy truncation_study(const std::function<Mat3(const Vec3&)>& gamma_of, Real k,
                                 const Vec3& probe_offset, const std::vector<Real>& half_widths,
                                 Real spacing, const SolverConfig& config = {},
                                 int node_cap = 1500000);

}  // namespace ellik

#endif  // ELLIK_GREENS_HPP
