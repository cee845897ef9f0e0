#include "hybridem/solvers.hpp"

#include <Eigen/SparseLU>

#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace hybridem {

void SpdSolver::factor(const Eigen::SparseMatrix<double>& a) {
  a_ = a;
  llt_ = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  llt_->compute(a_);
  if (llt_->info() != Eigen::Success) {
    llt_.reset();
    throw std::runtime_error("SpdSolver: factorization failed (matrix not SPD?)");
  }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const {
  if (!llt_) throw std::runtime_error("SpdSolver: not factored");
  Eigen::VectorXd x = llt_->solve(b);
  x += llt_->solve(b - a_ * x);
  return x;
}

Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b) {
  return SpdSolver(a).solve(b);
}

ConstrainedLsqResult constrained_lsq(const Eigen::MatrixXd& qmat, const Eigen::VectorXd& q,
                                     const Eigen::MatrixXd& c, const Eigen::VectorXd& g,
                                     double rank_tol) {
  const long n = qmat.rows();
  if (qmat.cols() != n || q.size() != n)
    throw std::invalid_argument("constrained_lsq: inconsistent objective dimensions");

  ConstrainedLsqResult res;

  // Minimum-norm pseudo-inverse solve through an eigendecomposition of a
  // symmetric PSD matrix.
  auto psd_pinv_solve = [&](const Eigen::MatrixXd& h, const Eigen::VectorXd& r) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cut = rank_tol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd y = es.eigenvectors().transpose() * r;
    for (long i = 0; i < y.size(); ++i) y[i] = (ev[i] > cut) ? y[i] / ev[i] : 0.0;
    return Eigen::VectorXd(es.eigenvectors() * y);
  };

  if (c.rows() == 0) {
    res.x = psd_pinv_solve(qmat, q);
    res.stationarity_residual = (qmat * res.x - q).norm();
    return res;
  }
  if (c.cols() != n || g.size() != c.rows())
    throw std::invalid_argument("constrained_lsq: inconsistent constraint dimensions");

  // Everything both trivial: the zero vector is feasible and optimal.
  if (q.isZero(0.0) && g.isZero(0.0)) {
    res.x = Eigen::VectorXd::Zero(n);
    res.rank_c = -1;
    return res;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = (sv.size() > 0) ? sv[0] : 0.0;
  long rank = 0;
  while (rank < sv.size() && sv[rank] > rank_tol * smax) ++rank;
  res.rank_c = rank;

  // minimum-norm particular solution (orthogonal to null(C))
  Eigen::VectorXd xp = Eigen::VectorXd::Zero(n);
  {
    Eigen::VectorXd ug = svd.matrixU().leftCols(rank).transpose() * g;
    for (long i = 0; i < rank; ++i) ug[i] /= sv[i];
    xp = svd.matrixV().leftCols(rank) * ug;
  }
  const double feas = (c * xp - g).norm();
  const double feas_scale = c.cwiseAbs().maxCoeff() * (xp.norm() + 1.0) + g.norm();
  if (feas > 100.0 * rank_tol * std::max(feas_scale, 1.0))
    throw std::runtime_error("constrained_lsq: constraints inconsistent, residual " +
                             std::to_string(feas));

  const long nullity = n - rank;
  if (nullity == 0) {
    res.x = xp;
    res.feasibility_residual = feas;
    return res;
  }
  const Eigen::MatrixXd nbasis = svd.matrixV().rightCols(nullity);
  const Eigen::MatrixXd h = nbasis.transpose() * qmat * nbasis;
  const Eigen::VectorXd r = nbasis.transpose() * (q - qmat * xp);
  // x_p is orthogonal to the null space, so minimizing ||z|| minimizes ||x||
  const Eigen::VectorXd z = psd_pinv_solve(h, r);
  res.x = xp + nbasis * z;
  res.feasibility_residual = (c * res.x - g).norm();
  res.stationarity_residual = (nbasis.transpose() * (qmat * res.x - q)).norm();
  return res;
}

Eigen::MatrixXd nullspace_basis(const Eigen::SparseMatrix<double>& b, double rank_tol) {
  if (b.rows() > 20000 || b.cols() > 20000)
    throw std::invalid_argument("nullspace_basis: size exceeds the dense desk-scale limit");
  const Eigen::MatrixXd bd(b);
  if (bd.cwiseAbs().maxCoeff() == 0.0)
    return Eigen::MatrixXd::Identity(b.rows(), b.rows());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(bd, Eigen::ComputeFullU);
  const Eigen::VectorXd& sv = svd.singularValues();
  long rank = 0;
  while (rank < sv.size() && sv[rank] > rank_tol * sv[0]) ++rank;
  return svd.matrixU().rightCols(bd.rows() - rank);
}

EigenPair eigen_shift_invert(const Eigen::SparseMatrix<double>& a,
                             const Eigen::SparseMatrix<double>& m, double sigma, double tol,
                             int max_iter) {
  const long n = a.rows();
  EigenPair pair;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double shift = sigma;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::SparseMatrix<double> shifted = a - shift * m;
    shifted.makeCompressed();
    lu.compute(shifted);
    if (lu.info() == Eigen::Success) break;
    // sigma hit an eigenvalue (singular factorization): perturb and retry
    shift = sigma + (attempt + 1) * 1e-8 * std::max(1.0, std::abs(sigma));
  }
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("eigen_shift_invert: factorization failed");

  std::mt19937 rng(42);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(rng);
  v /= std::sqrt(v.dot(m * v));

  // normwise scales for the backward-error convergence test
  double norm_a = 0.0, norm_m = 0.0;
  for (int o = 0; o < a.outerSize(); ++o) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, o); it; ++it) s += std::abs(it.value());
    norm_a = std::max(norm_a, s);
  }
  for (int o = 0; o < m.outerSize(); ++o) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, o); it; ++it) s += std::abs(it.value());
    norm_m = std::max(norm_m, s);
  }

  double lambda = shift;
  double best = std::numeric_limits<double>::max();
  int stagnant = 0;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd w = lu.solve(m * v);
    const double mn = std::sqrt(w.dot(m * w));
    if (!(mn > 0.0) || !std::isfinite(mn))
      throw std::runtime_error("eigen_shift_invert: iteration broke down");
    v = w / mn;
    lambda = v.dot(a * v);
    const Eigen::VectorXd resid = a * v - lambda * (m * v);
    pair.residual = resid.norm() / ((norm_a + std::abs(lambda) * norm_m) * v.norm());
    pair.iterations = it;
    if (pair.residual <= tol) {
      pair.value = lambda;
      pair.vector = v;
      return pair;
    }
    // round-off floor for this shift: stop once the residual stops improving
    stagnant = (pair.residual > 0.99 * best) ? stagnant + 1 : 0;
    best = std::min(best, pair.residual);
    if (stagnant >= 5) break;
  }
  char msg[160];
  std::snprintf(msg, sizeof(msg),
                "eigen_shift_invert: stalled at residual %.3e after %d iterations (tol %.3e)",
                pair.residual, pair.iterations, tol);
  throw std::runtime_error(msg);
}

}  // namespace hybridem
