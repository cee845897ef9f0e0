#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>

namespace hybridem {

/// Sparse SPD factorization with one step of iterative refinement per solve.
class SpdSolver {
 public:
  SpdSolver() = default;
  explicit SpdSolver(const Eigen::SparseMatrix<double>& a) { factor(a); }

  void factor(const Eigen::SparseMatrix<double>& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  bool ok() const { return llt_ != nullptr; }

 private:
  Eigen::SparseMatrix<double> a_;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
};

Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b);

struct ConstrainedLsqResult {
  Eigen::VectorXd x;
  double feasibility_residual = 0.0;  // ||C x - g||
  double stationarity_residual = 0.0; // ||N^T (Q x - q)|| over the constraint null space
  long rank_c = 0;
};

/// Minimize (1/2) x^T Q x - q^T x subject to C x = g (Q symmetric PSD,
/// constraints consistent up to rank_tol). Among non-unique minimizers the
/// minimum-Euclidean-norm one is returned. Dense, rank-revealing; intended
/// for desk-scale problems. Throws on an inconsistent constraint system.
ConstrainedLsqResult constrained_lsq(const Eigen::MatrixXd& qmat, const Eigen::VectorXd& q,
                                     const Eigen::MatrixXd& c, const Eigen::VectorXd& g,
                                     double rank_tol = 1e-10);

/// Orthonormal basis Z of the left null space of B: B^T Z = 0. Dense SVD;
/// guarded against non-desk-scale inputs.
Eigen::MatrixXd nullspace_basis(const Eigen::SparseMatrix<double>& b, double rank_tol = 1e-10);

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // M-normalized: x^T M x = 1
  double residual = 0.0;   // ||A x - value M x|| / ||A x||
  int iterations = 0;
};

/// Shift-invert inverse iteration for the symmetric pencil (A, M), M SPD.
/// Converges to the eigenvalue nearest sigma; deterministic start vector.
EigenPair eigen_shift_invert(const Eigen::SparseMatrix<double>& a,
                             const Eigen::SparseMatrix<double>& m, double sigma,
                             double tol = 1e-12, int max_iter = 200);

}  // namespace hybridem
