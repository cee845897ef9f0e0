#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>

#include "hybridem/mesh.hpp"
#include "hybridem/spaces.hpp"

namespace hybridem {

/// All forms for one (mesh, degree) configuration. k is the broken vector
/// degree; the scalar constraint space has degree k+1, the multiplier space
/// degree mult_degree, and the flux space degree mult_degree - 1.
///
/// Conventions: M(i,j) = eps <v_i, v_j>; A(i,j) = <mu^{-1} curl v_i, curl v_j>
/// summed over cells; B(i, nu) = -sum_K int_{dK} h_nu (v_i . t) ds with t the
/// counterclockwise traversal tangent; beta((K,j), d) = int_{dK} phi_j w_d.n.
struct SystemMatrices {
  int k = 1;
  int mult_degree = 3;
  int div_degree = 2;
  int scalar_degree = 2;
  double eps = 1.0;
  double mu = 1.0;

  Eigen::SparseMatrix<double> M, M_plain, A, B;
  Eigen::SparseMatrix<double> Mhat, Khat;  // multiplier mass and stiffness
  Eigen::SparseMatrix<double> R;           // R(nu, i) = <curl h_nu, v_i>
  Eigen::SparseMatrix<double> W;           // W(nu, j) = <h_nu, s_j>, s in broken P_{k-1}
  Eigen::SparseMatrix<double> G;           // grad: broken P_{k+1} -> broken vector P_k
  Eigen::SparseMatrix<double> curl_map;    // broken vector P_k -> broken P_{k-1}
  Eigen::SparseMatrix<double> beta;        // broken P_{k+1} x div space
  Eigen::SparseMatrix<double> Mdiv;        // div-space mass
  Eigen::SparseMatrix<double> Mdiv_cross;  // div space x broken vector P_k

  ConformingEdgeMap conf;  // embedding P
  DivConformingMap div;
  MultiplierMap mult;

  long broken_dim() const { return M.rows(); }
};

SystemMatrices assemble(const Mesh& mesh, int k, int mult_degree, double eps, double mu);

/// The boundary pairing beta((K,j), d) = int_{dK} phi_j (w_d . n) ds alone,
/// for a broken scalar space of the given degree against the div space.
Eigen::SparseMatrix<double> assemble_constraint_form(const Mesh& mesh, int scalar_degree,
                                                     const DivConformingMap& div);

/// Directly assembled conforming mass/stiffness (no embedding products).
void assemble_conforming_direct(const Mesh& mesh, const ConformingEdgeMap& conf, double eps,
                                double mu, Eigen::SparseMatrix<double>& mass,
                                Eigen::SparseMatrix<double>& stiffness);

Eigen::VectorXd load_vector_broken(const Mesh& mesh, int k, const VectorField& f, int quad_degree);
Eigen::VectorXd load_vector_broken_scalar(const Mesh& mesh, int m, const ScalarField& f,
                                          int quad_degree);

/// L2 projections (element-local solves for broken spaces).
Eigen::VectorXd project_broken_vector(const Mesh& mesh, int k, const VectorField& f,
                                      int quad_degree);
Eigen::VectorXd project_broken_scalar(const Mesh& mesh, int m, const ScalarField& f,
                                      int quad_degree);
Eigen::VectorXd project_multiplier(const Mesh& mesh, const MultiplierMap& map,
                                   const Eigen::SparseMatrix<double>& mhat, const ScalarField& f,
                                   int quad_degree);

FieldCoefficients project_field(const Mesh& mesh, const SpaceHandle& space, const VectorField& vf,
                                const ScalarField& sf, int quad_degree);

}  // namespace hybridem
