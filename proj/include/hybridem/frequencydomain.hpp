#pragma once

#include <vector>

#include "hybridem/assembly.hpp"
#include "hybridem/recovery.hpp"

namespace hybridem {

/// The analytic benchmark mode on (0,pi)^2 with omega^2 = 2; real
/// representatives are used throughout (the electric flux is compared
/// through omega * A).
struct BenchmarkMode {
  static double omega2() { return 2.0; }
  static Eigen::Vector2d potential(const Eigen::Vector2d& x);  // A, ||A|| = 1
  static double magnetic(const Eigen::Vector2d& x);            // H
  static Eigen::Vector2d flux_proxy(const Eigen::Vector2d& x); // omega * A
};

struct EigenResult {
  int r = 2;
  int n = 0;
  double omega2 = 0.0;
  double eig_residual = 0.0;
  Eigen::VectorXd a_reduced;   // conforming coordinates, L2-normalized
  Eigen::VectorXd a_broken;
  Eigen::VectorXd hhat;        // post-processed trace (empty before post_process)
  Eigen::VectorXd dhat;        // div-space coefficients of curl hhat / omega
  double err_H = 0.0, err_Hhat = 0.0, err_D = 0.0, err_Dhat = 0.0;
  double div_D = 0.0, div_Dhat = 0.0;  // H(div;T_h) seminorms of the two fluxes
};

/// Eigenpair of the kernel-space pencil nearest sigma, lifted to broken
/// coefficients, L2-normalized and sign-aligned with the benchmark mode.
EigenResult solve_eigenmode(const Mesh& mesh, const SystemMatrices& sys, double sigma,
                            double tol = 1e-12);

/// Hybrid post-processing: recover the numerical trace and the
/// divergence-free flux, then fill the benchmark error record.
void post_process(const Mesh& mesh, const SystemMatrices& sys, const RecoverySolver& recovery,
                  EigenResult& eig);

struct ConvergenceRow {
  int r = 0, n = 0;
  double err_H = 0.0, rate_H = 0.0;
  double err_Hhat = 0.0, rate_Hhat = 0.0;
  double err_D = 0.0, rate_D = 0.0;
  double err_Dhat = 0.0, rate_Dhat = 0.0;
  double omega2 = 0.0;
  bool has_rate = false;
};

std::vector<ConvergenceRow> convergence_study(const std::vector<int>& rs,
                                              const std::vector<int>& ns, double sigma,
                                              double tol = 1e-12);

}  // namespace hybridem
