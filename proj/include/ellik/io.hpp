// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_IO_HPP
#define ELLIK_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ellik/assembly.hpp"
#include "ellik/mesh.hpp"

namespace ellik {

/// Formats a real with 17 significant digits (exact double round-trip),
/// locale-independent.
std::string format_real(Real v);

/// Legacy-ASCII VTK structured-points export of one scalar node field.
/// Values are written on the full node lattice in x-fastest order; nodes
/// outside the active domain are written as 0.
void write_vtk_structured_points(std::ostream& out, const BoxMesh& mesh,
                                 const std::string& field_name, const VectorXr& node_values);

/// Matrix Market coordinate complex export (1-based indices, stored entries).
void write_matrix_market(std::ostream& out, const ComplexSparseMatrix& mat);

/// Minimal CSV writer: provenance header lines (as "# key=value" comments),
/// one column-name row, then data rows with 17-significant-digit floats.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void comment(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  static std::string cell(Real v) { return format_real(v); }
  static std::string cell(int v) { return std::to_string(v); }

 private:
  std::ostream& out_;
  std::size_t columns_ = 0;
};

/// FNV-1a 64-bit hash, used to stamp CSV output with the configuration hash.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace ellik

#endif  // ELLIK_IO_HPP
