// SPDX-License-Identifier: Apache-2.0

#include "ellik/io.hpp"

#include <cstdio>
#include <ostream>

namespace ellik {

std::string format_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_vtk_structured_points(std::ostream& out, const BoxMesh& mesh,
                                 const std::string& field_name, const VectorXr& node_values) {
  if (node_values.size() != mesh.node_count())
    throw Error("write_vtk_structured_points: field size mismatch");
  const Vec3i dims = mesh.node_grid_dims();
  out << "# vtk DataFile Version 3.0\n";
  out << field_name << "\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << dims.x() << " " << dims.y() << " " << dims.z() << "\n";
  out << "ORIGIN " << format_real(mesh.origin().x()) << " " << format_real(mesh.origin().y())
      << " " << format_real(mesh.origin().z()) << "\n";
  out << "SPACING " << format_real(mesh.spacing().x()) << " " << format_real(mesh.spacing().y())
      << " " << format_real(mesh.spacing().z()) << "\n";
  const long total = static_cast<long>(dims.x()) * dims.y() * dims.z();
  out << "POINT_DATA " << total << "\n";
  out << "SCALARS " << field_name << " double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (long g = 0; g < total; ++g) {
    const int a = mesh.active_node_of_grid(static_cast<int>(g));
    out << format_real(a >= 0 ? node_values[a] : 0.0) << "\n";
  }
}

void write_matrix_market(std::ostream& out, const ComplexSparseMatrix& mat) {
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << mat.n << " " << mat.n << " " << mat.nnz() << "\n";
  for (int i = 0; i < mat.n; ++i)
    for (int p = mat.row_offsets[i]; p < mat.row_offsets[i + 1]; ++p)
      out << (i + 1) << " " << (mat.cols[p] + 1) << " " << format_real(mat.values[p].real())
          << " " << format_real(mat.values[p].imag()) << "\n";
}

void CsvWriter::comment(const std::string& key, const std::string& value) {
  out_ << "# " << key << "=" << value << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  columns_ = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ellik
