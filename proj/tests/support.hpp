#pragma once

// Shared helpers for the unit and acceptance suites: random fields and
// charge-compatible initial data for conservation property tests.

#include <random>
#include <set>

#include "hybridem/diagnostics.hpp"
#include "hybridem/solvers.hpp"
#include "hybridem/timedomain.hpp"

namespace hybridem::testsupport {

inline Eigen::VectorXd random_vec(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Broken-scalar coefficients of each continuous Lagrange basis function
/// (columns); exact since the trace restriction is polynomial.
inline Eigen::SparseMatrix<double> multiplier_to_broken_scalar(const Mesh& mesh,
                                                               const MultiplierMap& map) {
  const int m = map.degree;
  const LagrangeBasis& lag = lagrange_basis(m);
  const ScalarModalBasis& sm = scalar_modal(m);
  const TriangleRule rule = gauss_triangle(2 * m + 2);
  Eigen::Matrix2Xd pts(2, rule.size());
  for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
  Eigen::MatrixXd lv, mv;
  lag.eval(pts, lv);
  sm.eval(pts, mv);
  const Eigen::MatrixXd wmv = mv * rule.weights.asDiagonal();
  const Eigen::MatrixXd gram = wmv * mv.transpose();
  const Eigen::MatrixXd conv = gram.ldlt().solve(wmv * lv.transpose());  // modal x lagrange

  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int i = 0; i < sm.dim(); ++i)
      for (int j = 0; j < lag.dim(); ++j)
        if (conv(i, j) != 0.0)
          trip.emplace_back(static_cast<long>(c) * sm.dim() + i, map.cell_dofs[c][j],
                            conv(i, j));
  Eigen::SparseMatrix<double> out(static_cast<long>(mesh.num_cells()) * sm.dim(), map.dim);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// Global DOF indices of a degree-m continuous space lying on the boundary.
inline std::set<long> boundary_scalar_dofs(const Mesh& mesh, const MultiplierMap& map) {
  std::set<long> out;
  const int per_edge = map.degree - 1;
  const long edge_base = mesh.num_vertices();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.boundary_edge[e]) continue;
    out.insert(mesh.edges[e][0]);
    out.insert(mesh.edges[e][1]);
    for (int j = 0; j < per_edge; ++j)
      out.insert(edge_base + static_cast<long>(e) * per_edge + j);
  }
  return out;
}

struct CompatibleData {
  Eigen::VectorXd a0_red, d0_red;
  Eigen::VectorXd dhat0;
  SourceSpec sources;
};

/// Random kernel-space initial data satisfying the compatibility hypothesis
/// against a random polynomial source pair with rho_dot + div J = 0 exactly
/// (J constant in time, rho linear in time).
inline CompatibleData random_compatible_data(const TimeDomainProblem& problem, unsigned seed) {
  const Mesh& mesh = *problem.mesh;
  const SystemMatrices& sys = problem.sys;
  const int r = sys.scalar_degree;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  // random polynomial sources: J componentwise degree <= 1, rho_0 degree <= 1
  const double jc[8] = {unif(rng), unif(rng), unif(rng), unif(rng),
                        unif(rng), unif(rng), unif(rng), unif(rng)};
  const double rc[3] = {unif(rng), unif(rng), unif(rng)};
  SourceSpec sources;
  sources.zero = false;
  sources.current = [jc](const Eigen::Vector2d& x, double) {
    return Eigen::Vector2d(jc[0] + jc[1] * x.x() + jc[2] * x.y() + jc[3] * x.x() * x.y(),
                           jc[4] + jc[5] * x.x() + jc[6] * x.y() + jc[7] * x.x() * x.y());
  };
  auto div_j = [jc](const Eigen::Vector2d& x) {
    return jc[1] + jc[3] * x.y() + jc[6] + jc[7] * x.x();
  };
  sources.charge = [rc, div_j](const Eigen::Vector2d& x, double t) {
    return rc[0] + rc[1] * x.x() + rc[2] * x.y() - t * div_j(x);
  };
  sources.charge_rate = [div_j](const Eigen::Vector2d& x, double) { return -div_j(x); };

  // compatibility: <grad phi', D_0> + <rho_0, phi'> = 0 for continuous
  // zero-boundary phi' of degree r
  const MultiplierMap scalar_map = multiplier_map(mesh, r);
  const Eigen::SparseMatrix<double> lift = multiplier_to_broken_scalar(mesh, scalar_map);
  const Eigen::SparseMatrix<double> grad_rows =
      Eigen::SparseMatrix<double>((sys.G * lift).transpose()) * sys.M_plain *
      problem.kernel;  // mult-r x reduced
  const Eigen::VectorXd rho_loads =
      lift.transpose() * load_vector_broken_scalar(mesh, r, sources.charge_at(0.0),
                                                   2 * r + 4);

  const std::set<long> bdofs = boundary_scalar_dofs(mesh, scalar_map);
  std::vector<long> rows;
  for (long j = 0; j < scalar_map.dim; ++j)
    if (bdofs.find(j) == bdofs.end()) rows.push_back(j);

  Eigen::MatrixXd cons(rows.size(), problem.reduced_dim());
  Eigen::VectorXd rhs(rows.size());
  const Eigen::MatrixXd grad_dense(grad_rows);
  for (size_t i = 0; i < rows.size(); ++i) {
    cons.row(i) = grad_dense.row(rows[i]);
    rhs[i] = -rho_loads[rows[i]];
  }

  CompatibleData data;
  data.sources = sources;
  data.a0_red = random_vec(problem.reduced_dim(), seed + 1);
  const Eigen::VectorXd d_free = random_vec(problem.reduced_dim(), seed + 2);
  // closest feasible point to the random draw
  const ConstrainedLsqResult corr = constrained_lsq(
      Eigen::MatrixXd::Identity(problem.reduced_dim(), problem.reduced_dim()), d_free, cons,
      rhs, 1e-10);
  data.d0_red = corr.x;
  data.dhat0 = init_Dhat(problem, problem.lift(data.d0_red), sources.charge_at(0.0));
  return data;
}

}  // namespace hybridem::testsupport
