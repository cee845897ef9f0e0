#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "hybridem/mesh.hpp"

namespace hybridem {

/// Per-cell data for legacy ASCII VTK output (cell type 5).
struct VtkCellData {
  std::vector<std::pair<std::string, Eigen::VectorXd>> scalars;
  std::vector<std::pair<std::string, Eigen::Matrix2Xd>> vectors;
};

void write_vtk_cell_data(const Mesh& mesh, const std::string& path, const VtkCellData& data);

}  // namespace hybridem
