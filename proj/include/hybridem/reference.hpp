#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "hybridem/quadrature.hpp"

namespace hybridem {

/// Shifted Legendre polynomial P_j(2t-1) on [0,1]; L_j(1-t) = (-1)^j L_j(t)
/// and \int_0^1 L_i L_j = delta_ij / (2j+1).
double shifted_legendre(int j, double t);

/// Orthonormalized graded-monomial basis for P_k on the reference triangle.
class ScalarModalBasis {
 public:
  explicit ScalarModalBasis(int degree);

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(monos_.size()); }

  /// vals(i, q) = phi_i at point q; pts columns are reference coordinates.
  void eval(const Eigen::Matrix2Xd& pts, Eigen::MatrixXd& vals) const;
  void eval_grad(const Eigen::Matrix2Xd& pts, Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) const;

 private:
  int degree_;
  std::vector<std::pair<int, int>> monos_;  // (a, b) exponents, graded order
  Eigen::MatrixXd coeff_;                   // phi_i = sum_m coeff_(i,m) x^a y^b
};

/// Nodal Lagrange basis of degree m on the equispaced barycentric lattice.
/// Node order: vertices v0,v1,v2; then per local edge (0:v1->v2, 1:v2->v0,
/// 2:v0->v1) the m-1 interior nodes in traversal order; then interior
/// lattice nodes. Degree 0 is the single cell-average node.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree);

  struct NodeInfo {
    enum Kind { Vertex, Edge, Interior } kind;
    int sub;  // vertex id or local edge id
    int idx;  // position along the edge (0..m-2) or interior counter
  };

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(node_info_.size()); }
  const Eigen::Matrix2Xd& nodes() const { return nodes_; }
  const std::vector<NodeInfo>& node_info() const { return node_info_; }

  void eval(const Eigen::Matrix2Xd& pts, Eigen::MatrixXd& vals) const;
  void eval_grad(const Eigen::Matrix2Xd& pts, Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) const;

 private:
  int degree_;
  Eigen::Matrix2Xd nodes_;
  std::vector<NodeInfo> node_info_;
  ScalarModalBasis modal_;
  Eigen::MatrixXd coeff_in_modal_;  // psi_i = sum_j coeff(i,j) phi_j
};

/// Vector polynomial space P_k^2 in the stacked modal layout:
/// index i < ns is (phi_i, 0), index ns + i is (0, phi_i), ns = dim P_k.
/// Tangential-trace (rotated BDM) degrees of freedom: per local edge a,
/// moments \int_0^1 v(x(t)) . (q_a - p_a) L_j(t) dt for j = 0..k, followed
/// by interior moments against an orthonormal basis of the tangential
/// bubble subspace.
class EdgeElement {
 public:
  explicit EdgeElement(int degree);

  int degree() const { return degree_; }
  int scalar_dim() const { return ns_; }
  int dim() const { return 2 * ns_; }
  int edge_dofs() const { return degree_ + 1; }
  int n_edge_dofs() const { return 3 * (degree_ + 1); }
  int n_interior() const { return dim() - n_edge_dofs(); }

  /// Rows = DOF functionals applied to the vector modal basis (dim x dim).
  const Eigen::MatrixXd& dof_matrix() const { return dof_matrix_; }
  /// Column per DOF: modal coefficients of the dual basis function.
  const Eigen::MatrixXd& dual_in_modal() const { return dual_in_modal_; }
  /// Edge-moment rows only (3(k+1) x dim).
  const Eigen::MatrixXd& edge_moment_rows() const { return edge_rows_; }
  /// Modal coefficients of the interior bubble basis (dim x n_interior).
  const Eigen::MatrixXd& bubble_modal() const { return bubble_; }

 private:
  int degree_;
  int ns_;
  Eigen::MatrixXd dof_matrix_, dual_in_modal_, edge_rows_, bubble_;
};

/// Reference endpoints of local edge a in traversal order.
std::pair<Eigen::Vector2d, Eigen::Vector2d> ref_edge_endpoints(int a);

/// Cached reference objects (built on first use; single-threaded setup).
const ScalarModalBasis& scalar_modal(int degree);
const LagrangeBasis& lagrange_basis(int degree);
const EdgeElement& edge_element(int degree);

/// Coefficients of grad(scalar modal, degree m) in the vector modal basis of
/// degree m-1; identical on every cell under the covariant push-forward.
/// Shape: dim P_{m-1}^2 x dim P_m.
Eigen::MatrixXd grad_coefficients(int m);

/// Coefficients of curl(vector modal, degree k) = dx v_y - dy v_x in the
/// scalar modal basis of degree k-1 (reference level; the physical curl
/// additionally scales by 1/det J per cell). Shape: dim P_{k-1} x dim P_k^2.
Eigen::MatrixXd curl_coefficients(int k);

/// Supported basis families for the make_basis entry point.
enum class BasisFamily { ScalarLagrange, VectorP, EdgeBdm };

/// Dimension, per-edge/interior DOF counts, and unisolvence data for a
/// family; throws on unsupported (family, degree).
struct BasisInfo {
  BasisFamily family;
  int degree;
  int dim;
  int dofs_per_edge;  // tangential-trace DOFs (EdgeBdm only)
  int interior_dofs;
};

BasisInfo make_basis(BasisFamily family, int degree);

}  // namespace hybridem
