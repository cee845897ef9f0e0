#pragma once

#include <Eigen/Dense>

#include "hybridem/assembly.hpp"

namespace hybridem {

/// H(div; T_h) seminorm of a broken vector field: root-sum-square of the
/// element-wise divergence L2 norms.
double hdiv_seminorm(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs, int quad_degree);

double l2_norm_broken_vector(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                             int quad_degree);

double l2_error_broken_vector(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                              const VectorField& exact, int quad_degree);
double l2_error_broken_scalar(const Mesh& mesh, int m, const Eigen::VectorXd& coeffs,
                              const ScalarField& exact, int quad_degree);
double l2_error_multiplier(const Mesh& mesh, const MultiplierMap& map,
                           const Eigen::VectorXd& coeffs, const ScalarField& exact,
                           int quad_degree);

/// Experimental order of convergence under mesh halving.
double eoc(double err_coarse, double err_fine);

/// Max over cells and broken scalar test functions of
///   int_K (grad phi . D + phi rho) - int_{dK} phi (Dhat . n),
/// evaluated through the assembled forms.
double constraint_residual(const Mesh& mesh, const SystemMatrices& sys,
                           const Eigen::VectorXd& d_broken, const Eigen::VectorXd& dhat,
                           const ScalarField& rho, int quad_degree);

/// Max over cells of |int_{dK} Dhat . n - int_K rho|.
double flux_residual_max(const Mesh& mesh, const SystemMatrices& sys,
                         const Eigen::VectorXd& dhat, const ScalarField& rho, int quad_degree);

/// L2 inner product of a broken vector field with an analytic field.
double inner_broken_vector(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                           const VectorField& field, int quad_degree);

}  // namespace hybridem
