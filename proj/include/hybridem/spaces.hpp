#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <vector>

#include "hybridem/mesh.hpp"
#include "hybridem/reference.hpp"

namespace hybridem {

using ScalarField = std::function<double(const Eigen::Vector2d&)>;
using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;
/// Batch evaluation of a field at reference points of one cell (2 x n).
using CellwiseVectorField =
    std::function<Eigen::Matrix2Xd(int cell, const Eigen::Matrix2Xd& ref_pts)>;

enum class SpaceKind {
  BrokenVector,        // discontinuous P_k^2, covariant per-cell modal basis
  BrokenScalar,        // discontinuous P_m, per-cell modal basis
  MultiplierLagrange,  // continuous Lagrange P_m, no boundary elimination
  ConformingEdge,      // tangentially continuous P_k^2, boundary DOFs dropped
  DivConforming,       // normally continuous P_k^2, no boundary elimination
};

struct SpaceHandle {
  SpaceKind kind;
  int degree = 0;
  long dim = 0;
  int local_dim = 0;  // broken container dimension per cell (0 if shared DOFs)
};

struct FieldCoefficients {
  SpaceHandle space;
  Eigen::VectorXd values;
};

SpaceHandle build_space(const Mesh& mesh, SpaceKind kind, int degree);

/// Continuous-Lagrange DOF numbering: vertices, then (m-1) DOFs per edge
/// ordered along the global (low->high) direction, then cell interiors.
struct MultiplierMap {
  int degree = 0;
  long dim = 0;
  std::vector<std::vector<int>> cell_dofs;  // local Lagrange node -> global DOF
};

MultiplierMap multiplier_map(const Mesh& mesh, int degree);

/// Tangentially continuous edge space of degree k inside the broken vector
/// container: each column of P holds the broken coefficients of one global
/// basis function (unit tangential edge moment, or a unit interior moment).
/// Boundary-edge DOFs are eliminated.
struct ConformingEdgeMap {
  int degree = 0;
  long dim = 0;
  std::vector<int> interior_edge_index;   // edge -> compact index, -1 on boundary
  Eigen::SparseMatrix<double> embedding;  // broken-dim x dim
};

ConformingEdgeMap conforming_edge_map(const Mesh& mesh, int degree);

/// Normally continuous (rotated) space of degree k, all edges included.
struct DivConformingMap {
  int degree = 0;
  long dim = 0;
  Eigen::SparseMatrix<double> embedding;  // broken-dim x dim
};

DivConformingMap div_conforming_map(const Mesh& mesh, int degree);

/// DOF interpolation into the div-conforming space; exact for members of the
/// space. quad_degree controls the moment quadrature for non-polynomial input.
Eigen::VectorXd div_interpolate(const Mesh& mesh, int degree, const VectorField& field,
                                int quad_degree);
Eigen::VectorXd div_interpolate_cellwise(const Mesh& mesh, int degree,
                                         const CellwiseVectorField& field, int quad_degree);

/// Element-wise gradient as a coefficient map from broken scalar degree m to
/// broken vector degree m-1 (block diagonal, identical reference block).
Eigen::SparseMatrix<double> grad_embedding(const Mesh& mesh, int m);

/// Element-wise scalar curl of a broken vector field of degree k, as a
/// coefficient map to broken scalar degree k-1 (scales by 1/det per cell).
Eigen::SparseMatrix<double> curl_matrix(const Mesh& mesh, int k);

/// Least-squares coordinates of a broken field in an embedded space;
/// residual_out reports the distance to the range (0 for members).
Eigen::VectorXd embedded_coefficients(const Eigen::SparseMatrix<double>& embedding,
                                      const Eigen::VectorXd& broken, double* residual_out = nullptr);

// Point evaluation. ref_pts are reference coordinates in the given cell;
// broken vector fields use the covariant push-forward.
Eigen::Matrix2Xd eval_broken_vector(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                                    int cell, const Eigen::Matrix2Xd& ref_pts);
Eigen::VectorXd eval_broken_vector_div(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                                       int cell, const Eigen::Matrix2Xd& ref_pts);
Eigen::VectorXd eval_broken_vector_curl(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                                        int cell, const Eigen::Matrix2Xd& ref_pts);
Eigen::VectorXd eval_broken_scalar(const Mesh& mesh, int m, const Eigen::VectorXd& coeffs,
                                   int cell, const Eigen::Matrix2Xd& ref_pts);
Eigen::Matrix2Xd eval_broken_scalar_grad(const Mesh& mesh, int m, const Eigen::VectorXd& coeffs,
                                         int cell, const Eigen::Matrix2Xd& ref_pts);
Eigen::VectorXd eval_multiplier(const Mesh& mesh, const MultiplierMap& map,
                                const Eigen::VectorXd& coeffs, int cell,
                                const Eigen::Matrix2Xd& ref_pts);
Eigen::Matrix2Xd eval_multiplier_grad(const Mesh& mesh, const MultiplierMap& map,
                                      const Eigen::VectorXd& coeffs, int cell,
                                      const Eigen::Matrix2Xd& ref_pts);

}  // namespace hybridem
