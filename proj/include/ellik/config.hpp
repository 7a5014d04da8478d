// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_CONFIG_HPP
#define ELLIK_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "ellik/coeffs.hpp"
#include "ellik/linsolve.hpp"
#include "ellik/mesh.hpp"
#include "ellik/types.hpp"

namespace ellik {

/// Thrown on config syntax errors (with line/column) and on validation errors
/// (with the offending section.key path).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raw sectioned key = value data, before semantic validation.
struct RawConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;

  /// Canonical dump (sorted sections and keys), the basis of the config hash.
  std::string canonical() const;
};

/// Parses the flat sectioned format:
///   [section]
///   key = value tokens
/// '#' and ';' start comments. Unknown sections or keys are hard errors.
RawConfig parse_config_text(const std::string& text);
RawConfig parse_config_file(const std::string& path);

/// Applies an override of the form "section.key=value".
void apply_override(RawConfig& raw, const std::string& assignment);

enum class Experiment {
  solve,
  mms,
  green_decay,
  neumann_sweep,
  k_independence,
  energy,
  lift_check,
  truncation,
  oscillation,
};

const std::vector<std::pair<Experiment, std::string>>& experiment_names();
std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

/// Fully validated experiment description.
struct ExperimentConfig {
  Experiment experiment = Experiment::solve;
  BC bc = BC::dirichlet;

  // mesh
  Vec3 origin = Vec3::Zero();
  Vec3 extent = Vec3::Ones();
  Vec3i divisions = Vec3i::Constant(8);
  std::string mask = "none";  // none | l-shape | cube-hole

  // coefficients
  PatternSpec gamma_pattern = PatternSpec::identity();
  Real k = 1.0;
  std::vector<Real> k_list;
  std::string k_field = "constant";  // constant | half-step | sine
  Real k0 = 1.0, k_lo = 0.0, k_hi = 1.0;
  bool has_b = false, has_b_tilde = false, has_c = false;
  Vec3 b = Vec3::Zero(), b_tilde = Vec3::Zero();
  Real c = 0.0;

  // estimator / experiment-specific
  Vec3 x0 = Vec3::Constant(0.5);
  Real r = 0.25;
  Real alpha = 0.5;
  Real p = 2.0;
  Real r_min = 0.0, r_max = 0.0;  // 0 = default window
  Real q = 2.0;
  std::vector<Real> radii;
  Real lift_T = 0.1;
  std::vector<int> steps_list;
  std::vector<int> divisions_list;
  std::vector<Real> R_list;
  Real spacing = 0.125;
  Vec3 probe = Vec3(0.375, 0, 0);
  Complex f = Complex(1, 0);

  // solver
  SolverConfig solver;

  // output
  std::string output_dir = "out";
  bool write_csv = true;
  bool write_vtk = false;

  std::string config_hash;  // hex FNV-1a of the canonical raw config

  /// Builds the mesh this configuration describes.
  BoxMesh make_mesh() const;
  /// Builds the coefficient set on a mesh (pattern gamma, k field or constant,
  /// optional constant lower-order terms).
  CoefficientSet make_coeffs(const BoxMesh& mesh) const;
};

/// Semantic validation; throws ConfigError naming the field path.
ExperimentConfig validate_config(const RawConfig& raw);

}  // namespace ellik

#endif  // ELLIK_CONFIG_HPP
