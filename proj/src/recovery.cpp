#include "hybridem/recovery.hpp"

#include <stdexcept>

#include "hybridem/solvers.hpp"

namespace hybridem {

RecoverySolver::RecoverySolver(const Mesh& mesh, const SystemMatrices& sys, double rank_tol)
    : mesh_(&mesh), k_(sys.k), rank_tol_(rank_tol) {
  const EdgeElement& el = edge_element(k_);
  nloc_ = el.dim();
  nm_ = sys.mult.dim;
  edge_rows_ = el.edge_moment_rows();
  trace_gram_.compute(edge_rows_ * edge_rows_.transpose());
  if (trace_gram_.info() != Eigen::Success)
    throw std::runtime_error("RecoverySolver: trace map is rank deficient");

  // Deduplicated rows: mu_{e,j}(hhat) = int_0^1 hhat|_e (tau) L_j(tau) dtau with
  // the global low->high parametrization; assembled from each edge's owner cell.
  const int per_edge = k_ + 1;
  const LagrangeBasis& lag = lagrange_basis(sys.mult_degree);
  const MultiplierMap& mult = sys.mult;
  const IntervalRule rule = gauss_interval(k_ + sys.mult_degree + 2);
  std::array<Eigen::MatrixXd, 3> lag_edge;
  for (int a = 0; a < 3; ++a) {
    auto [p, q] = ref_edge_endpoints(a);
    Eigen::Matrix2Xd pts(2, rule.size());
    for (int i = 0; i < rule.size(); ++i) pts.col(i) = p + rule.points[i] * (q - p);
    lag.eval(pts, lag_edge[a]);
  }

  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int a = 0; a < 3; ++a) {
      const int e = mesh.cell_edges[c][a];
      if (mesh.edge_cells[e][0] != c) continue;  // owner assembles
      const int sgn = mesh.cell_edge_sign[c][a];
      for (int j = 0; j < per_edge; ++j) {
        // L_j in the global parameter picks (-1)^j when the local one flips
        const double orient = (sgn == 1) ? 1.0 : ((j % 2 == 0) ? 1.0 : -1.0);
        for (int i = 0; i < lag.dim(); ++i) {
          double val = 0.0;
          for (int qq = 0; qq < rule.size(); ++qq)
            val += rule.weights[qq] * lag_edge[a](i, qq) *
                   shifted_legendre(j, rule.points[qq]);
          if (val != 0.0)
            trip.emplace_back(static_cast<long>(e) * per_edge + j, mult.cell_dofs[c][i],
                              orient * val);
        }
      }
    }
  }
  c_rows_.resize(static_cast<long>(mesh.num_edges()) * per_edge, nm_);
  c_rows_.setFromTriplets(trip.begin(), trip.end());

  qmat_ = sys.Mhat + sys.Khat;

  sparse_path_ = sys.mult_degree >= k_ + 2;
  if (sparse_path_) {
    const long nc = c_rows_.rows();
    std::vector<Eigen::Triplet<double>> kt;
    kt.reserve(qmat_.nonZeros() + 2 * c_rows_.nonZeros());
    for (int o = 0; o < qmat_.outerSize(); ++o)
      for (Eigen::SparseMatrix<double>::InnerIterator it(qmat_, o); it; ++it)
        kt.emplace_back(it.row(), it.col(), it.value());
    for (int o = 0; o < c_rows_.outerSize(); ++o)
      for (Eigen::SparseMatrix<double>::InnerIterator it(c_rows_, o); it; ++it) {
        kt.emplace_back(nm_ + it.row(), it.col(), it.value());
        kt.emplace_back(it.col(), nm_ + it.row(), it.value());
      }
    kkt_.resize(nm_ + nc, nm_ + nc);
    kkt_.setFromTriplets(kt.begin(), kt.end());
    kkt_.makeCompressed();
    kkt_lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    kkt_lu_->compute(kkt_);
    if (kkt_lu_->info() != Eigen::Success)
      throw std::runtime_error("RecoverySolver: KKT factorization failed");
  } else {
    if (nm_ > 20000) throw std::runtime_error("RecoverySolver: dense fallback too large");
    qmat_dense_ = Eigen::MatrixXd(qmat_);
    c_dense_ = Eigen::MatrixXd(c_rows_);
  }
}

Eigen::VectorXd RecoverySolver::reduce_rhs(const Eigen::VectorXd& g, double* residual) const {
  const Mesh& mesh = *mesh_;
  const int per_edge = k_ + 1;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<long>(mesh.num_edges()) * per_edge);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(c.size());
  double res2 = 0.0;
  double mismatch = 0.0;

  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const Eigen::VectorXd gk = g.segment(static_cast<long>(cell) * nloc_, nloc_);
    // unique y with T^T y = g per cell: E E^T (S y) = E g
    const Eigen::VectorXd eg = edge_rows_ * gk;
    const Eigen::VectorXd sy = trace_gram_.solve(eg);
    res2 += (edge_rows_.transpose() * sy - gk).squaredNorm();
    for (int a = 0; a < 3; ++a) {
      const int e = mesh.cell_edges[cell][a];
      const int d = mesh.cell_edge_sign[cell][a];
      for (int j = 0; j < per_edge; ++j) {
        // y_(cell,a,j) = s_{a,j} * sy; constraint value = -d * y / (2j+1)
        const double s = (d == 1) ? 1.0 : ((j % 2 == 0) ? -1.0 : 1.0);
        const double y = s * sy[a * per_edge + j];
        const double val = -d * y / (2.0 * j + 1.0);
        const long row = static_cast<long>(e) * per_edge + j;
        if (counts[row] > 0.0) mismatch = std::max(mismatch, std::abs(c[row] - val));
        c[row] += val;
        counts[row] += 1.0;
      }
    }
  }
  for (long i = 0; i < c.size(); ++i) c[i] /= counts[i];
  if (residual) *residual = std::sqrt(res2) + mismatch;
  return c;
}

RecoverySolver::Result RecoverySolver::solve(const Eigen::VectorXd& q,
                                             const Eigen::VectorXd& g) const {
  Result out;
  const Eigen::VectorXd c = reduce_rhs(g, &out.trace_residual);
  if (sparse_path_) {
    Eigen::VectorXd rhs(nm_ + c.size());
    rhs.head(nm_) = q;
    rhs.tail(c.size()) = c;
    Eigen::VectorXd sol = kkt_lu_->solve(rhs);
    sol += kkt_lu_->solve(rhs - kkt_ * sol);
    out.hhat = sol.head(nm_);
  } else {
    const ConstrainedLsqResult lsq = constrained_lsq(qmat_dense_, q, c_dense_, c, rank_tol_);
    out.hhat = lsq.x;
  }
  return out;
}

}  // namespace hybridem
