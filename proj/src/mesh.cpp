#include "hybridem/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace hybridem {

int Mesh::num_boundary_edges() const {
  int n = 0;
  for (char b : boundary_edge) n += (b != 0);
  return n;
}

std::array<int, 2> Mesh::local_edge_vertices(int cell, int a) const {
  const auto& t = tris[cell];
  switch (a) {
    case 0: return {t[1], t[2]};
    case 1: return {t[2], t[0]};
    case 2: return {t[0], t[1]};
    default: throw std::out_of_range("local edge index");
  }
}

namespace {

void connect_edges(Mesh& mesh) {
  const int nv = mesh.num_vertices();
  std::unordered_map<long long, int> edge_of;
  edge_of.reserve(mesh.tris.size() * 2);

  mesh.cell_edges.assign(mesh.tris.size(), {-1, -1, -1});
  mesh.cell_edge_sign.assign(mesh.tris.size(), {0, 0, 0});

  for (int k = 0; k < mesh.num_cells(); ++k) {
    for (int a = 0; a < 3; ++a) {
      auto [p, q] = mesh.local_edge_vertices(k, a);
      const int lo = std::min(p, q), hi = std::max(p, q);
      const long long key = static_cast<long long>(lo) * nv + hi;
      auto it = edge_of.find(key);
      int e;
      if (it == edge_of.end()) {
        e = mesh.num_edges();
        edge_of.emplace(key, e);
        mesh.edges.push_back({lo, hi});
        mesh.edge_cells.push_back({k, -1});
      } else {
        e = it->second;
        if (mesh.edge_cells[e][1] != -1)
          throw std::runtime_error("mesh: edge with more than two cells");
        mesh.edge_cells[e][1] = k;
      }
      mesh.cell_edges[k][a] = e;
      mesh.cell_edge_sign[k][a] = (p < q) ? 1 : -1;
    }
  }

  mesh.boundary_edge.assign(mesh.num_edges(), 0);
  double hmax = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    mesh.boundary_edge[e] = (mesh.edge_cells[e][1] == -1) ? 1 : 0;
    const double len = (mesh.vertices[mesh.edges[e][1]] - mesh.vertices[mesh.edges[e][0]]).norm();
    hmax = std::max(hmax, len);
  }
  mesh.h = hmax;
}

}  // namespace

Mesh generate_uniform_grid(int n, const Rect& domain) {
  if (n < 1) throw std::invalid_argument("generate_uniform_grid: N must be >= 1");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw std::invalid_argument("generate_uniform_grid: degenerate rectangle");

  Mesh mesh;
  const double dx = domain.width() / n;
  const double dy = domain.height() / n;

  mesh.vertices.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(domain.x0 + i * dx, domain.y0 + j * dy);

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };

  mesh.tris.reserve(static_cast<size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p00 = vid(i, j), p10 = vid(i + 1, j);
      const int p01 = vid(i, j + 1), p11 = vid(i + 1, j + 1);
      // split along the p00 -> p11 diagonal, both triangles ccw
      mesh.tris.push_back({p00, p10, p11});
      mesh.tris.push_back({p00, p11, p01});
    }
  }

  connect_edges(mesh);
  return mesh;
}

CellGeometry geometry(const Mesh& mesh, int cell) {
  if (cell < 0 || cell >= mesh.num_cells()) throw std::out_of_range("geometry: cell index");
  const auto& t = mesh.tris[cell];
  CellGeometry g;
  g.v0 = mesh.vertices[t[0]];
  g.jac.col(0) = mesh.vertices[t[1]] - g.v0;
  g.jac.col(1) = mesh.vertices[t[2]] - g.v0;
  g.det = g.jac.determinant();
  if (!(g.det > 0.0)) throw std::runtime_error("geometry: non-positive cell orientation");
  g.jac_inv = g.jac.inverse();
  for (int a = 0; a < 3; ++a) {
    auto [p, q] = mesh.local_edge_vertices(cell, a);
    const Eigen::Vector2d d = mesh.vertices[q] - mesh.vertices[p];
    g.edge_length[a] = d.norm();
    g.tangent[a] = d / g.edge_length[a];
    // ccw traversal => outward normal is the tangent rotated by -90 degrees
    g.normal[a] = Eigen::Vector2d(g.tangent[a].y(), -g.tangent[a].x());
  }
  return g;
}

double triangle_area(const Mesh& mesh, int cell) {
  const auto& t = mesh.tris[cell];
  const Eigen::Vector2d a = mesh.vertices[t[1]] - mesh.vertices[t[0]];
  const Eigen::Vector2d b = mesh.vertices[t[2]] - mesh.vertices[t[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

void write_vtk_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk_mesh: cannot open " + path);
  out << "# vtk DataFile Version 3.0\n"
      << "hybridem mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", v.x(), v.y());
    out << buf;
  }
  out << "CELLS " << mesh.num_cells() << " " << 4 * mesh.num_cells() << "\n";
  for (const auto& t : mesh.tris) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.num_cells() << "\n";
  for (int k = 0; k < mesh.num_cells(); ++k) out << "5\n";
}

}  // namespace hybridem
