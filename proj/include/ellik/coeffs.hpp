// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_COEFFS_HPP
#define ELLIK_COEFFS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ellik/mesh.hpp"
#include "ellik/types.hpp"

namespace ellik {

/// Coefficient data of the operator -div(gamma grad u + b~ u) + b.grad u + c u + i k u,
/// stored piecewise constant per active cell. The k field is kept per cell even
/// when constant (the tag records that), so assembly has a single code path.
struct CoefficientSet {
  std::vector<Mat3> gamma;          // one per active cell
  std::vector<Real> k;              // one per active cell
  bool k_is_constant = true;        // tag: k was given as a single constant
  std::vector<Vec3> b;              // optional drift, empty when absent
  std::vector<Vec3> b_tilde;        // optional divergence-form drift
  std::vector<Real> c;              // optional zero-order real coefficient

  bool has_lower_order() const { return !b.empty() || !b_tilde.empty() || !c.empty(); }

  /// Constant-k value; throws when k is a genuine field.
  Real constant_k() const;

  /// True when k vanishes on every cell.
  bool k_all_zero() const;

  /// sup over cells of |b| + |b~| + |c| (Euclidean vector norms); 0 when absent.
  Real lower_order_bound() const;

  /// Returns a copy with the constant k replaced (sweep helper).
  CoefficientSet with_constant_k(Real k_value) const;

  /// Returns the coefficient data of the adjoint operator:
  /// gamma -> gamma^T per cell, k -> -k, b and b~ swapped, c unchanged.
  CoefficientSet adjoint() const;
};

/// Largest nu in (0,1] with nu|xi|^2 <= Re(xi^H gamma xi) and |gamma| <= 1/nu on
/// every cell: min over cells of min(lambda_min((gamma+gamma^T)/2), 1/|gamma|_2).
/// Throws naming the first offending cell when the symmetric part is not
/// positive definite.
Real verify_ellipticity(const CoefficientSet& coeffs, const BoxMesh& mesh);

struct OscillationSample {
  Vec3 center;
  Real radius = 0;
  Real k_mean = 0;   // volume-weighted mean over cells intersecting the ball
  Real value = 0;    // r^2 (avg |k - k_mean|^q)^(1/q)
  bool skipped = false;  // ball intersected no active cell
};

/// Scale-weighted q-mean oscillation of a variable k(x), sampled on
/// user-supplied balls. kappa_o is the max over non-skipped samples and is a
/// lower bound for the supremum over all balls of radius <= r_o.
struct OscillationReport {
  Real r_o = 0;
  Real q = 0;
  Real kappa_o = 0;
  std::vector<OscillationSample> table;
};

/// Samples r^2 (fint_{B_r} |k - k_bar_r|^q)^(1/q) at every (center, radius)
/// pair; cells count as inside when their box intersects the closed ball, each
/// weighted by its full volume. Requires q > 3/2 and radii in (0, r_o].
OscillationReport oscillation_seminorm(const std::vector<Real>& k_field, const BoxMesh& mesh,
                                       Real r_o, Real q, const std::vector<Vec3>& sample_centers,
                                       const std::vector<Real>& radii);

/// Builtin gamma patterns evaluated at cell centers.
struct PatternSpec {
  enum class Kind { identity, checkerboard, sphere_inclusion, rotated_aniso };
  Kind kind = Kind::identity;
  // checkerboard
  Real gamma_lo = 1, gamma_hi = 1;
  // sphere_inclusion
  Vec3 center = Vec3::Constant(0.5);
  Real radius = 0.25;
  Mat3 gamma_in = Mat3::Identity(), gamma_out = Mat3::Identity();
  // rotated_aniso
  Vec3 axis = Vec3::UnitZ();
  Real angle = 0;
  Vec3 eigenvalues = Vec3::Ones();

  // period of the geometric checkerboard evaluation (pattern_at); the
  // mesh-based pattern() alternates per cell instead
  Real period = 0.125;

  static PatternSpec identity();
  static PatternSpec checkerboard(Real lo, Real hi);
  static PatternSpec sphere_inclusion(const Vec3& center, Real radius, const Mat3& inside,
                                      const Mat3& outside);
  static PatternSpec rotated_aniso(const Vec3& axis, Real angle, Real l1, Real l2, Real l3);
};

/// Evaluates a pattern at an arbitrary point of R^3 (the checkerboard
/// alternates with the spec's period). Used by whole-space studies.
Mat3 pattern_at(const PatternSpec& spec, const Vec3& x);

/// Builds a CoefficientSet with gamma from the pattern, constant k, and no
/// lower-order terms. Ellipticity is verified; violations propagate.
CoefficientSet pattern(const PatternSpec& spec, const BoxMesh& mesh, Real k_constant = 1.0);

/// Per-cell k fields for tests and experiments.
std::vector<Real> constant_k_field(const BoxMesh& mesh, Real value);

/// Plain-text per-cell coefficient table. One line per active cell, columns:
///   cell_index g00 g01 g02 g10 g11 g12 g20 g21 g22 k [bx by bz btx bty btz c]
/// i.e. 11 columns, or 18 when the lower-order block is present.
CoefficientSet import_coefficient_table(std::istream& in, const BoxMesh& mesh);

}  // namespace ellik

#endif  // ELLIK_COEFFS_HPP
