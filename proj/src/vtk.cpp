#include "hybridem/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hybridem {

void write_vtk_cell_data(const Mesh& mesh, const std::string& path, const VtkCellData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk_cell_data: cannot open " + path);
  out << "# vtk DataFile Version 3.0\n"
      << "hybridem fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  char buf[160];
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", v.x(), v.y());
    out << buf;
  }
  out << "CELLS " << mesh.num_cells() << " " << 4 * mesh.num_cells() << "\n";
  for (const auto& t : mesh.tris) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.num_cells() << "\n";
  for (int k = 0; k < mesh.num_cells(); ++k) out << "5\n";

  if (data.scalars.empty() && data.vectors.empty()) return;
  out << "CELL_DATA " << mesh.num_cells() << "\n";
  for (const auto& [name, values] : data.scalars) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (long i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", values[i]);
      out << buf;
    }
  }
  for (const auto& [name, values] : data.vectors) {
    out << "VECTORS " << name << " double\n";
    for (long i = 0; i < values.cols(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", values(0, i), values(1, i));
      out << buf;
    }
  }
}

}  // namespace hybridem
