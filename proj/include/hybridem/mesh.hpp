#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace hybridem {

/// Axis-aligned rectangle (x0,x1) x (y0,y1).
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// 2-D simplicial triangulation with oriented edge connectivity.
///
/// Triangles are stored counterclockwise. Edges carry a global orientation
/// from the lower to the higher vertex index; cell_edge_sign records whether
/// a cell's local (counterclockwise) traversal of each edge agrees with it.
/// Immutable after construction.
struct Mesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<int, 2>> edges;           // lo < hi vertex index
  std::vector<std::array<int, 3>> cell_edges;      // local edge a opposite vertex a
  std::vector<std::array<int, 3>> cell_edge_sign;  // +1 iff local traversal = lo->hi
  std::vector<std::array<int, 2>> edge_cells;      // second entry -1 on the boundary
  std::vector<char> boundary_edge;
  double h = 0.0;  // max edge length

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(tris.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_boundary_edges() const;
  int num_interior_edges() const { return num_edges() - num_boundary_edges(); }

  /// Local endpoints of local edge a of cell K, in traversal order
  /// (a=0: v1->v2, a=1: v2->v0, a=2: v0->v1).
  std::array<int, 2> local_edge_vertices(int cell, int a) const;
};

/// Affine map data for one cell: x = v0 + J * xhat.
struct CellGeometry {
  Eigen::Vector2d v0;
  Eigen::Matrix2d jac;      // [v1-v0 | v2-v0]
  Eigen::Matrix2d jac_inv;
  double det = 0.0;         // 2 * area, positive
  std::array<Eigen::Vector2d, 3> normal;   // outward unit, per local edge
  std::array<Eigen::Vector2d, 3> tangent;  // ccw traversal unit, t = (-n_y, n_x)
  std::array<double, 3> edge_length;

  Eigen::Vector2d map(const Eigen::Vector2d& ref) const { return v0 + jac * ref; }
  Eigen::Vector2d unmap(const Eigen::Vector2d& phys) const { return jac_inv * (phys - v0); }
};

/// Uniform N x N grid on a rectangle, each square split along the
/// lower-left to upper-right diagonal. Throws std::invalid_argument for
/// N < 1 or a degenerate rectangle.
Mesh generate_uniform_grid(int n, const Rect& domain);

CellGeometry geometry(const Mesh& mesh, int cell);

double triangle_area(const Mesh& mesh, int cell);

/// Legacy ASCII VTK export of the triangulation (cell type 5).
void write_vtk_mesh(const Mesh& mesh, const std::string& path);

}  // namespace hybridem
