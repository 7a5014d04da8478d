// SPDX-License-Identifier: Apache-2.0

#include "ellik/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

namespace ellik {

Real CoefficientSet::constant_k() const {
  if (!k_is_constant) throw Error("CoefficientSet: k is a variable field, not a constant");
  return k.empty() ? 0.0 : k.front();
}

bool CoefficientSet::k_all_zero() const {
  return std::all_of(k.begin(), k.end(), [](Real v) { return v == 0.0; });
}

Real CoefficientSet::lower_order_bound() const {
  Real m = 0;
  const std::size_t n = gamma.size();
  for (std::size_t i = 0; i < n; ++i) {
    Real s = 0;
    if (!b.empty()) s += b[i].norm();
    if (!b_tilde.empty()) s += b_tilde[i].norm();
    if (!c.empty()) s += std::abs(c[i]);
    m = std::max(m, s);
  }
  return m;
}

CoefficientSet CoefficientSet::with_constant_k(Real k_value) const {
  if (k_value == 0.0) throw Error("CoefficientSet: constant k must be nonzero");
  CoefficientSet out = *this;
  out.k.assign(gamma.size(), k_value);
  out.k_is_constant = true;
  return out;
}

CoefficientSet CoefficientSet::adjoint() const {
  CoefficientSet out = *this;
  for (auto& g : out.gamma) g = Mat3(g.transpose());
  for (auto& v : out.k) v = -v;
  std::swap(out.b, out.b_tilde);
  return out;
}

Real verify_ellipticity(const CoefficientSet& coeffs, const BoxMesh& mesh) {
  if (static_cast<int>(coeffs.gamma.size()) != mesh.cell_count())
    throw Error("verify_ellipticity: gamma not defined on every active cell");
  Real nu = std::numeric_limits<Real>::infinity();
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    const Mat3& g = coeffs.gamma[cell];
    const Mat3 sym = 0.5 * (g + g.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> es(sym, Eigen::EigenvaluesOnly);
    const Real lambda_min = es.eigenvalues().minCoeff();
    if (!(lambda_min > 0)) {
      std::ostringstream os;
      os << "ellipticity violation: symmetric part not positive definite on cell "
         << mesh.cell_multi_index(cell).transpose() << " (lambda_min = " << lambda_min << ")";
      throw Error(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Mat3> gram(Mat3(g.transpose() * g), Eigen::EigenvaluesOnly);
    const Real op_norm = std::sqrt(gram.eigenvalues().maxCoeff());
    nu = std::min(nu, std::min(lambda_min, 1.0 / op_norm));
  }
  return nu;
}

OscillationReport oscillation_seminorm(const std::vector<Real>& k_field, const BoxMesh& mesh,
                                       Real r_o, Real q, const std::vector<Vec3>& sample_centers,
                                       const std::vector<Real>& radii) {
  if (!(q > 1.5)) throw Error("oscillation_seminorm: requires q > n/2 = 3/2");
  if (static_cast<int>(k_field.size()) != mesh.cell_count())
    throw Error("oscillation_seminorm: k field size mismatch");
  for (Real r : radii) {
    if (!(r > 0)) throw Error("oscillation_seminorm: radii must be positive");
    if (r > r_o) throw Error("oscillation_seminorm: radius exceeds r_o");
  }

  OscillationReport report;
  report.r_o = r_o;
  report.q = q;

  const Vec3 half = 0.5 * mesh.spacing();
  for (const Vec3& center : sample_centers) {
    for (Real r : radii) {
      OscillationSample s;
      s.center = center;
      s.radius = r;
      // Cells whose box intersects the closed ball.
      std::vector<int> cells;
      for (int cell = 0; cell < mesh.cell_count(); ++cell) {
        const Vec3 cc = mesh.cell_center(cell);
        Real d2 = 0;
        for (int d = 0; d < 3; ++d) {
          const Real gap = std::max(std::abs(center[d] - cc[d]) - half[d], 0.0);
          d2 += gap * gap;
        }
        if (d2 <= r * r) cells.push_back(cell);
      }
      if (cells.empty()) {
        s.skipped = true;
        report.table.push_back(s);
        continue;
      }
      Real mean = 0;
      for (int cell : cells) mean += k_field[cell];
      mean /= static_cast<Real>(cells.size());  // uniform cell volumes
      Real qsum = 0;
      for (int cell : cells) qsum += std::pow(std::abs(k_field[cell] - mean), q);
      const Real qmean = std::pow(qsum / static_cast<Real>(cells.size()), 1.0 / q);
      s.k_mean = mean;
      s.value = r * r * qmean;
      report.table.push_back(s);
      report.kappa_o = std::max(report.kappa_o, s.value);
    }
  }
  return report;
}

PatternSpec PatternSpec::identity() { return PatternSpec{}; }

PatternSpec PatternSpec::checkerboard(Real lo, Real hi) {
  PatternSpec s;
  s.kind = Kind::checkerboard;
  s.gamma_lo = lo;
  s.gamma_hi = hi;
  return s;
}

PatternSpec PatternSpec::sphere_inclusion(const Vec3& center, Real radius, const Mat3& inside,
                                          const Mat3& outside) {
  PatternSpec s;
  s.kind = Kind::sphere_inclusion;
  s.center = center;
  s.radius = radius;
  s.gamma_in = inside;
  s.gamma_out = outside;
  return s;
}

PatternSpec PatternSpec::rotated_aniso(const Vec3& axis, Real angle, Real l1, Real l2, Real l3) {
  PatternSpec s;
  s.kind = Kind::rotated_aniso;
  s.axis = axis.normalized();
  s.angle = angle;
  s.eigenvalues = Vec3(l1, l2, l3);
  return s;
}

Mat3 pattern_at(const PatternSpec& spec, const Vec3& x) {
  switch (spec.kind) {
    case PatternSpec::Kind::identity:
      return Mat3::Identity();
    case PatternSpec::Kind::checkerboard: {
      long parity = 0;
      for (int d = 0; d < 3; ++d) parity += static_cast<long>(std::floor(x[d] / spec.period));
      const bool even = ((parity % 2) + 2) % 2 == 0;
      return (even ? spec.gamma_lo : spec.gamma_hi) * Mat3::Identity();
    }
    case PatternSpec::Kind::sphere_inclusion:
      return (x - spec.center).norm() <= spec.radius ? spec.gamma_in : spec.gamma_out;
    case PatternSpec::Kind::rotated_aniso: {
      const Mat3 rot = Eigen::AngleAxisd(spec.angle, spec.axis).toRotationMatrix();
      return rot * spec.eigenvalues.asDiagonal() * rot.transpose();
    }
  }
  return Mat3::Identity();
}

CoefficientSet pattern(const PatternSpec& spec, const BoxMesh& mesh, Real k_constant) {
  CoefficientSet out;
  out.gamma.resize(mesh.cell_count());
  switch (spec.kind) {
    case PatternSpec::Kind::identity:
      std::fill(out.gamma.begin(), out.gamma.end(), Mat3::Identity());
      break;
    case PatternSpec::Kind::checkerboard:
      for (int cell = 0; cell < mesh.cell_count(); ++cell) {
        const Vec3i m = mesh.cell_multi_index(cell);
        const bool even = ((m.x() + m.y() + m.z()) % 2) == 0;
        out.gamma[cell] = (even ? spec.gamma_lo : spec.gamma_hi) * Mat3::Identity();
      }
      break;
    case PatternSpec::Kind::sphere_inclusion:
      for (int cell = 0; cell < mesh.cell_count(); ++cell) {
        const bool in = (mesh.cell_center(cell) - spec.center).norm() <= spec.radius;
        out.gamma[cell] = in ? spec.gamma_in : spec.gamma_out;
      }
      break;
    case PatternSpec::Kind::rotated_aniso: {
      const Mat3 rot = Eigen::AngleAxisd(spec.angle, spec.axis).toRotationMatrix();
      const Mat3 g = rot * spec.eigenvalues.asDiagonal() * rot.transpose();
      std::fill(out.gamma.begin(), out.gamma.end(), g);
      break;
    }
  }
  out.k = constant_k_field(mesh, k_constant);
  out.k_is_constant = true;
  verify_ellipticity(out, mesh);
  return out;
}

std::vector<Real> constant_k_field(const BoxMesh& mesh, Real value) {
  return std::vector<Real>(mesh.cell_count(), value);
}

CoefficientSet import_coefficient_table(std::istream& in, const BoxMesh& mesh) {
  CoefficientSet out;
  const int n = mesh.cell_count();
  out.gamma.assign(n, Mat3::Identity());
  out.k.assign(n, 0.0);
  out.k_is_constant = false;
  std::vector<std::uint8_t> seen(n, 0);
  bool lower_order = false;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<Real> vals;
    Real v;
    while (ls >> v) vals.push_back(v);
    if (vals.empty()) continue;
    if (vals.size() != 11 && vals.size() != 18)
      throw Error("coefficient table line " + std::to_string(lineno) +
                  ": expected 11 or 18 columns, got " + std::to_string(vals.size()));
    const int cell = static_cast<int>(vals[0]);
    if (cell < 0 || cell >= n)
      throw Error("coefficient table line " + std::to_string(lineno) + ": cell index out of range");
    if (seen[cell])
      throw Error("coefficient table line " + std::to_string(lineno) + ": duplicate cell index");
    seen[cell] = 1;
    Mat3 g;
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) g(r, s) = vals[1 + 3 * r + s];
    out.gamma[cell] = g;
    out.k[cell] = vals[10];
    if (vals.size() == 18) {
      if (!lower_order) {
        out.b.assign(n, Vec3::Zero());
        out.b_tilde.assign(n, Vec3::Zero());
        out.c.assign(n, 0.0);
        lower_order = true;
      }
      out.b[cell] = Vec3(vals[11], vals[12], vals[13]);
      out.b_tilde[cell] = Vec3(vals[14], vals[15], vals[16]);
      out.c[cell] = vals[17];
    }
  }
  for (int cell = 0; cell < n; ++cell)
    if (!seen[cell])
      throw Error("coefficient table: no row for active cell " + std::to_string(cell));
  verify_ellipticity(out, mesh);
  return out;
}

}  // namespace ellik
