#include "hybridem/spaces.hpp"

#include <Eigen/SparseCholesky>

#include <stdexcept>

namespace hybridem {

namespace {

int broken_vector_local_dim(int k) { return 2 * scalar_modal(k).dim(); }
int broken_scalar_local_dim(int m) { return scalar_modal(m).dim(); }

// Sign relating a cell-local edge moment to the globally oriented one:
// equal when the local traversal matches low->high, otherwise the moment
// against L_j picks (-1)^(j+1).
double edge_moment_sign(int cell_edge_sign, int j) {
  if (cell_edge_sign == 1) return 1.0;
  return (j % 2 == 0) ? -1.0 : 1.0;
}

}  // namespace

SpaceHandle build_space(const Mesh& mesh, SpaceKind kind, int degree) {
  SpaceHandle handle{kind, degree, 0, 0};
  const long t = mesh.num_cells();
  switch (kind) {
    case SpaceKind::BrokenVector:
      if (degree < 1 || degree > 5) throw std::invalid_argument("build_space: broken-vector degree 1..5");
      handle.local_dim = broken_vector_local_dim(degree);
      handle.dim = t * handle.local_dim;
      break;
    case SpaceKind::BrokenScalar:
      if (degree < 0 || degree > 6) throw std::invalid_argument("build_space: broken-scalar degree 0..6");
      handle.local_dim = broken_scalar_local_dim(degree);
      handle.dim = t * handle.local_dim;
      break;
    case SpaceKind::MultiplierLagrange:
      if (degree < 1 || degree > 7) throw std::invalid_argument("build_space: multiplier degree 1..7");
      handle.dim = multiplier_map(mesh, degree).dim;
      break;
    case SpaceKind::ConformingEdge:
      if (degree < 1 || degree > 5) throw std::invalid_argument("build_space: conforming-edge degree 1..5");
      handle.dim = static_cast<long>(mesh.num_interior_edges()) * (degree + 1) +
                   t * (degree + 1) * (degree - 1);
      break;
    case SpaceKind::DivConforming:
      if (degree < 1 || degree > 5) throw std::invalid_argument("build_space: div-conforming degree 1..5");
      handle.dim = static_cast<long>(mesh.num_edges()) * (degree + 1) +
                   t * (degree + 1) * (degree - 1);
      break;
  }
  return handle;
}

MultiplierMap multiplier_map(const Mesh& mesh, int degree) {
  const LagrangeBasis& basis = lagrange_basis(degree);
  const int m = degree;
  const int per_edge = m - 1;
  const int per_cell = (m - 1) * (m - 2) / 2;
  MultiplierMap map;
  map.degree = m;
  map.dim = mesh.num_vertices() + static_cast<long>(mesh.num_edges()) * per_edge +
            static_cast<long>(mesh.num_cells()) * per_cell;
  map.cell_dofs.resize(mesh.num_cells());

  const long edge_base = mesh.num_vertices();
  const long cell_base = edge_base + static_cast<long>(mesh.num_edges()) * per_edge;

  for (int k = 0; k < mesh.num_cells(); ++k) {
    auto& dofs = map.cell_dofs[k];
    dofs.resize(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) {
      const auto& info = basis.node_info()[i];
      switch (info.kind) {
        case LagrangeBasis::NodeInfo::Vertex:
          dofs[i] = mesh.tris[k][info.sub];
          break;
        case LagrangeBasis::NodeInfo::Edge: {
          const int e = mesh.cell_edges[k][info.sub];
          // info.idx counts from the local first endpoint; renumber along
          // the global low->high direction
          const int pos = (mesh.cell_edge_sign[k][info.sub] == 1) ? info.idx
                                                                  : (per_edge - 1 - info.idx);
          dofs[i] = static_cast<int>(edge_base + static_cast<long>(e) * per_edge + pos);
          break;
        }
        case LagrangeBasis::NodeInfo::Interior:
          dofs[i] = static_cast<int>(cell_base + static_cast<long>(k) * per_cell + info.idx);
          break;
      }
    }
  }
  return map;
}

namespace {

// Shared scaffolding for the conforming-edge and div-conforming spaces.
// include_boundary selects whether boundary-edge DOFs become columns.
// transform(cell) returns the 2x2 matrix applied to reference vector values
// before the covariant push (identity for the edge space, (1/det) J^T J R90
// for the rotated/Piola div space).
Eigen::SparseMatrix<double> build_trace_continuous_embedding(
    const Mesh& mesh, int k, bool include_boundary,
    const std::function<Eigen::Matrix2d(int)>& transform, long* dim_out,
    std::vector<int>* edge_index_out) {
  const EdgeElement& el = edge_element(k);
  const int ns = el.scalar_dim();
  const int nloc = el.dim();
  const int per_edge = k + 1;
  const int n_int = el.n_interior();

  std::vector<int> edge_index(mesh.num_edges(), -1);
  long next = 0;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (include_boundary || !mesh.boundary_edge[e]) edge_index[e] = static_cast<int>(next++);
  const long edge_dofs = next * per_edge;
  const long dim = edge_dofs + static_cast<long>(mesh.num_cells()) * n_int;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mesh.num_cells()) * nloc * (per_edge + 1));

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::Matrix2d tf = transform(c);
    const long row0 = static_cast<long>(c) * nloc;
    auto scatter = [&](long col, const Eigen::VectorXd& modal, double scale) {
      // apply the value-level transform block-wise: (x-block, y-block)
      for (int s = 0; s < ns; ++s) {
        const double vx = modal[s], vy = modal[ns + s];
        const double wx = tf(0, 0) * vx + tf(0, 1) * vy;
        const double wy = tf(1, 0) * vx + tf(1, 1) * vy;
        if (wx != 0.0) trip.emplace_back(row0 + s, col, scale * wx);
        if (wy != 0.0) trip.emplace_back(row0 + ns + s, col, scale * wy);
      }
    };
    for (int a = 0; a < 3; ++a) {
      const int e = mesh.cell_edges[c][a];
      if (edge_index[e] < 0) continue;
      for (int j = 0; j < per_edge; ++j) {
        const long col = static_cast<long>(edge_index[e]) * per_edge + j;
        const double s = edge_moment_sign(mesh.cell_edge_sign[c][a], j);
        scatter(col, el.dual_in_modal().col(a * per_edge + j), s);
      }
    }
    for (int i = 0; i < n_int; ++i) {
      const long col = edge_dofs + static_cast<long>(c) * n_int + i;
      scatter(col, el.dual_in_modal().col(3 * per_edge + i), 1.0);
    }
  }

  Eigen::SparseMatrix<double> P(static_cast<long>(mesh.num_cells()) * nloc, dim);
  P.setFromTriplets(trip.begin(), trip.end());
  if (dim_out) *dim_out = dim;
  if (edge_index_out) *edge_index_out = std::move(edge_index);
  return P;
}

}  // namespace

ConformingEdgeMap conforming_edge_map(const Mesh& mesh, int degree) {
  ConformingEdgeMap map;
  map.degree = degree;
  map.embedding = build_trace_continuous_embedding(
      mesh, degree, /*include_boundary=*/false,
      [](int) { return Eigen::Matrix2d::Identity(); }, &map.dim, &map.interior_edge_index);
  return map;
}

DivConformingMap div_conforming_map(const Mesh& mesh, int degree) {
  DivConformingMap map;
  map.degree = degree;
  Eigen::Matrix2d r90;
  r90 << 0.0, -1.0, 1.0, 0.0;
  map.embedding = build_trace_continuous_embedding(
      mesh, degree, /*include_boundary=*/true,
      [&mesh, r90](int c) -> Eigen::Matrix2d {
        const CellGeometry g = geometry(mesh, c);
        // Piola push of the rotated reference function, expressed through
        // the covariant container: J^{-T} ((1/det) J^T J R90 vhat).
        return (1.0 / g.det) * g.jac.transpose() * g.jac * r90;
      },
      &map.dim, nullptr);
  return map;
}

Eigen::VectorXd div_interpolate_cellwise(const Mesh& mesh, int degree,
                                         const CellwiseVectorField& field, int quad_degree) {
  const EdgeElement& el = edge_element(degree);
  const int per_edge = degree + 1;
  const int n_int = el.n_interior();
  const long edge_dofs = static_cast<long>(mesh.num_edges()) * per_edge;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(edge_dofs + static_cast<long>(mesh.num_cells()) * n_int);

  const IntervalRule erule = gauss_interval(quad_degree);
  const TriangleRule trule = gauss_triangle(quad_degree);
  Eigen::Matrix2Xd tpts(2, trule.size());
  for (int q = 0; q < trule.size(); ++q) tpts.col(q) = trule.point(q);
  std::array<Eigen::Matrix2Xd, 3> epts;
  std::array<Eigen::Vector2d, 3> edir;
  for (int a = 0; a < 3; ++a) {
    auto [p, q] = ref_edge_endpoints(a);
    edir[a] = q - p;
    epts[a].resize(2, erule.size());
    for (int i = 0; i < erule.size(); ++i) epts[a].col(i) = p + erule.points[i] * edir[a];
  }
  Eigen::MatrixXd bub_vals_x, bub_vals_y;
  if (n_int > 0) {
    const ScalarModalBasis& sm = scalar_modal(degree);
    Eigen::MatrixXd sv;
    sm.eval(tpts, sv);
    bub_vals_x = el.bubble_modal().topRows(el.scalar_dim()).transpose() * sv;
    bub_vals_y = el.bubble_modal().bottomRows(el.scalar_dim()).transpose() * sv;
  }

  Eigen::Matrix2d rm90;
  rm90 << 0.0, 1.0, -1.0, 0.0;

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const Eigen::Matrix2d pull = g.det * rm90 * g.jac_inv;  // vhat = pull * u(F(xhat))
    for (int a = 0; a < 3; ++a) {
      const int e = mesh.cell_edges[c][a];
      if (mesh.edge_cells[e][0] != c) continue;  // owner cell only
      const Eigen::Matrix2Xd uvals = field(c, epts[a]);
      for (int j = 0; j < per_edge; ++j) {
        double moment = 0.0;
        for (int i = 0; i < erule.size(); ++i) {
          const Eigen::Vector2d vhat = pull * uvals.col(i);
          moment += erule.weights[i] * shifted_legendre(j, erule.points[i]) * vhat.dot(edir[a]);
        }
        out[static_cast<long>(e) * per_edge + j] =
            edge_moment_sign(mesh.cell_edge_sign[c][a], j) * moment;
      }
    }
    if (n_int > 0) {
      const Eigen::Matrix2Xd uvals = field(c, tpts);
      for (int i = 0; i < n_int; ++i) {
        double moment = 0.0;
        for (int q = 0; q < trule.size(); ++q) {
          const Eigen::Vector2d vhat = pull * uvals.col(q);
          moment += trule.weights[q] * (vhat.x() * bub_vals_x(i, q) + vhat.y() * bub_vals_y(i, q));
        }
        out[edge_dofs + static_cast<long>(c) * n_int + i] = moment;
      }
    }
  }
  return out;
}

Eigen::VectorXd div_interpolate(const Mesh& mesh, int degree, const VectorField& field,
                                int quad_degree) {
  CellwiseVectorField cw = [&](int cell, const Eigen::Matrix2Xd& ref_pts) {
    const CellGeometry g = geometry(mesh, cell);
    Eigen::Matrix2Xd out(2, ref_pts.cols());
    for (Eigen::Index q = 0; q < ref_pts.cols(); ++q) out.col(q) = field(g.map(ref_pts.col(q)));
    return out;
  };
  return div_interpolate_cellwise(mesh, degree, cw, quad_degree);
}

Eigen::SparseMatrix<double> grad_embedding(const Mesh& mesh, int m) {
  const Eigen::MatrixXd block = grad_coefficients(m);  // (2*dim P_{m-1}) x dim P_m
  const long rows_per = block.rows(), cols_per = block.cols();
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (long i = 0; i < rows_per; ++i)
      for (long j = 0; j < cols_per; ++j)
        if (block(i, j) != 0.0)
          trip.emplace_back(c * rows_per + i, c * cols_per + j, block(i, j));
  Eigen::SparseMatrix<double> g(mesh.num_cells() * rows_per, mesh.num_cells() * cols_per);
  g.setFromTriplets(trip.begin(), trip.end());
  return g;
}

Eigen::SparseMatrix<double> curl_matrix(const Mesh& mesh, int k) {
  const Eigen::MatrixXd block = curl_coefficients(k);  // dim P_{k-1} x (2*dim P_k)
  const long rows_per = block.rows(), cols_per = block.cols();
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double scale = 1.0 / geometry(mesh, c).det;
    for (long i = 0; i < rows_per; ++i)
      for (long j = 0; j < cols_per; ++j)
        if (block(i, j) != 0.0)
          trip.emplace_back(c * rows_per + i, c * cols_per + j, scale * block(i, j));
  }
  Eigen::SparseMatrix<double> mat(mesh.num_cells() * rows_per, mesh.num_cells() * cols_per);
  mat.setFromTriplets(trip.begin(), trip.end());
  return mat;
}

Eigen::VectorXd embedded_coefficients(const Eigen::SparseMatrix<double>& embedding,
                                      const Eigen::VectorXd& broken, double* residual_out) {
  const Eigen::SparseMatrix<double> gram = Eigen::SparseMatrix<double>(embedding.transpose()) * embedding;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("embedded_coefficients: embedding is rank deficient");
  const Eigen::VectorXd c = llt.solve(embedding.transpose() * broken);
  if (residual_out) *residual_out = (embedding * c - broken).norm();
  return c;
}

namespace {

Eigen::VectorXd local_block(const Eigen::VectorXd& coeffs, int cell, int nloc) {
  return coeffs.segment(static_cast<long>(cell) * nloc, nloc);
}

}  // namespace

Eigen::Matrix2Xd eval_broken_vector(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                                    int cell, const Eigen::Matrix2Xd& ref_pts) {
  const ScalarModalBasis& sm = scalar_modal(k);
  const int ns = sm.dim();
  Eigen::MatrixXd vals;
  sm.eval(ref_pts, vals);
  const CellGeometry g = geometry(mesh, cell);
  const Eigen::Matrix2d jinv_t = g.jac_inv.transpose();
  const Eigen::VectorXd c = local_block(coeffs, cell, 2 * ns);
  Eigen::Matrix2Xd out(2, ref_pts.cols());
  const Eigen::RowVectorXd vx = c.head(ns).transpose() * vals;
  const Eigen::RowVectorXd vy = c.tail(ns).transpose() * vals;
  for (Eigen::Index q = 0; q < ref_pts.cols(); ++q)
    out.col(q) = jinv_t * Eigen::Vector2d(vx[q], vy[q]);
  return out;
}

namespace {

// Physical Jacobian of a covariant-pushed broken vector field at reference
// points: grad u = J^{-T} (grad_hat vhat) J^{-1}.
void broken_vector_phys_grad(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs, int cell,
                             const Eigen::Matrix2Xd& ref_pts, std::vector<Eigen::Matrix2d>& grads) {
  const ScalarModalBasis& sm = scalar_modal(k);
  const int ns = sm.dim();
  Eigen::MatrixXd gx, gy;
  sm.eval_grad(ref_pts, gx, gy);
  const CellGeometry g = geometry(mesh, cell);
  const Eigen::VectorXd c = local_block(coeffs, cell, 2 * ns);
  const Eigen::RowVectorXd dxx = c.head(ns).transpose() * gx;  // d vhat_x / d xhat
  const Eigen::RowVectorXd dxy = c.head(ns).transpose() * gy;
  const Eigen::RowVectorXd dyx = c.tail(ns).transpose() * gx;
  const Eigen::RowVectorXd dyy = c.tail(ns).transpose() * gy;
  grads.resize(ref_pts.cols());
  for (Eigen::Index q = 0; q < ref_pts.cols(); ++q) {
    Eigen::Matrix2d gh;
    gh << dxx[q], dxy[q], dyx[q], dyy[q];
    grads[q] = g.jac_inv.transpose() * gh * g.jac_inv;
  }
}

}  // namespace

Eigen::VectorXd eval_broken_vector_div(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                                       int cell, const Eigen::Matrix2Xd& ref_pts) {
  std::vector<Eigen::Matrix2d> grads;
  broken_vector_phys_grad(mesh, k, coeffs, cell, ref_pts, grads);
  Eigen::VectorXd out(ref_pts.cols());
  for (Eigen::Index q = 0; q < ref_pts.cols(); ++q) out[q] = grads[q].trace();
  return out;
}

Eigen::VectorXd eval_broken_vector_curl(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                                        int cell, const Eigen::Matrix2Xd& ref_pts) {
  std::vector<Eigen::Matrix2d> grads;
  broken_vector_phys_grad(mesh, k, coeffs, cell, ref_pts, grads);
  Eigen::VectorXd out(ref_pts.cols());
  for (Eigen::Index q = 0; q < ref_pts.cols(); ++q) out[q] = grads[q](1, 0) - grads[q](0, 1);
  return out;
}

Eigen::VectorXd eval_broken_scalar(const Mesh&, int m, const Eigen::VectorXd& coeffs,
                                   int cell, const Eigen::Matrix2Xd& ref_pts) {
  const ScalarModalBasis& sm = scalar_modal(m);
  Eigen::MatrixXd vals;
  sm.eval(ref_pts, vals);
  return vals.transpose() * local_block(coeffs, cell, sm.dim());
}

Eigen::Matrix2Xd eval_broken_scalar_grad(const Mesh& mesh, int m, const Eigen::VectorXd& coeffs,
                                         int cell, const Eigen::Matrix2Xd& ref_pts) {
  const ScalarModalBasis& sm = scalar_modal(m);
  Eigen::MatrixXd gx, gy;
  sm.eval_grad(ref_pts, gx, gy);
  const CellGeometry g = geometry(mesh, cell);
  const Eigen::VectorXd c = local_block(coeffs, cell, sm.dim());
  const Eigen::RowVectorXd rx = c.transpose() * gx;
  const Eigen::RowVectorXd ry = c.transpose() * gy;
  Eigen::Matrix2Xd out(2, ref_pts.cols());
  for (Eigen::Index q = 0; q < ref_pts.cols(); ++q)
    out.col(q) = g.jac_inv.transpose() * Eigen::Vector2d(rx[q], ry[q]);
  return out;
}

Eigen::VectorXd eval_multiplier(const Mesh&, const MultiplierMap& map,
                                const Eigen::VectorXd& coeffs, int cell,
                                const Eigen::Matrix2Xd& ref_pts) {
  const LagrangeBasis& basis = lagrange_basis(map.degree);
  Eigen::MatrixXd vals;
  basis.eval(ref_pts, vals);
  Eigen::VectorXd local(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) local[i] = coeffs[map.cell_dofs[cell][i]];
  return vals.transpose() * local;
}

Eigen::Matrix2Xd eval_multiplier_grad(const Mesh& mesh, const MultiplierMap& map,
                                      const Eigen::VectorXd& coeffs, int cell,
                                      const Eigen::Matrix2Xd& ref_pts) {
  const LagrangeBasis& basis = lagrange_basis(map.degree);
  Eigen::MatrixXd gx, gy;
  basis.eval_grad(ref_pts, gx, gy);
  Eigen::VectorXd local(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) local[i] = coeffs[map.cell_dofs[cell][i]];
  const CellGeometry g = geometry(mesh, cell);
  const Eigen::RowVectorXd rx = local.transpose() * gx;
  const Eigen::RowVectorXd ry = local.transpose() * gy;
  Eigen::Matrix2Xd out(2, ref_pts.cols());
  for (Eigen::Index q = 0; q < ref_pts.cols(); ++q)
    out.col(q) = g.jac_inv.transpose() * Eigen::Vector2d(rx[q], ry[q]);
  return out;
}

}  // namespace hybridem
