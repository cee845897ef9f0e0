#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>

#include "hybridem/assembly.hpp"

namespace hybridem {

/// Numerical-trace recovery: minimize
///   ||H - hhat||^2 + ||F - curl hhat||^2
/// over multiplier coefficients subject to b(v, hhat) = g(v) for every
/// broken test function v. The caller supplies the assembled linear data
///   q = W H_coeffs + R F_coeffs  and the broken-indexed right side g.
///
/// The broken-indexed constraints are reduced to one tangential-moment
/// constraint per (edge, moment): the per-cell trace map is square-solvable
/// block by block, and duplicate rows from the two incident cells collapse
/// up to a consistency residual (zero in exact arithmetic whenever g
/// annihilates ker B_h). With the reduced rows the KKT system is sparse and
/// nonsingular, factored once and reused across time steps.
///
/// For multiplier degrees below k+2 the reduced rows may lose rank, so the
/// solver falls back to the dense rank-revealing path at desk scale.
class RecoverySolver {
 public:
  RecoverySolver(const Mesh& mesh, const SystemMatrices& sys, double rank_tol = 1e-10);

  struct Result {
    Eigen::VectorXd hhat;
    double trace_residual = 0.0;  // reduction consistency, ||T^T y - g|| and edge-pair mismatch
  };

  Result solve(const Eigen::VectorXd& q, const Eigen::VectorXd& g) const;

  /// Deduplicated constraint rows (one block of k+1 rows per edge).
  const Eigen::SparseMatrix<double>& constraint_rows() const { return c_rows_; }
  /// Right side of the reduced rows for a given broken right side.
  Eigen::VectorXd reduce_rhs(const Eigen::VectorXd& g, double* residual = nullptr) const;
  bool sparse_path() const { return sparse_path_; }

 private:
  const Mesh* mesh_;
  int k_;
  int nloc_;
  long nm_;
  double rank_tol_;
  bool sparse_path_;

  Eigen::MatrixXd edge_rows_;       // reference tangential moment rows
  Eigen::LLT<Eigen::MatrixXd> trace_gram_;
  Eigen::SparseMatrix<double> c_rows_;
  Eigen::SparseMatrix<double> qmat_;  // Mhat + Khat
  Eigen::SparseMatrix<double> kkt_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> kkt_lu_;

  Eigen::MatrixXd qmat_dense_, c_dense_;  // fallback path
};

}  // namespace hybridem
