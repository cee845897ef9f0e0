#include <doctest.h>

#include <cmath>
#include <random>

#include "hybridem/recovery.hpp"
#include "hybridem/solvers.hpp"

using namespace hybridem;

namespace {

Eigen::VectorXd random_vec(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("trace-reduced recovery matches the dense constrained solve") {
  for (int k : {1, 2}) {
    const Mesh mesh = generate_uniform_grid(2, {0, 0, M_PI, M_PI});
    const SystemMatrices sys = assemble(mesh, k, k + 2, 1.0, 1.0);
    const RecoverySolver recovery(mesh, sys);
    CHECK(recovery.sparse_path());

    for (int trial = 0; trial < 3; ++trial) {
      // consistent right side by construction
      const Eigen::VectorXd h0 = random_vec(sys.mult.dim, 500 + 10 * k + trial);
      const Eigen::VectorXd g = sys.B * h0;
      const Eigen::VectorXd q = random_vec(sys.mult.dim, 600 + 10 * k + trial);

      const RecoverySolver::Result res = recovery.solve(q, g);
      CHECK(res.trace_residual <= 1e-10 * std::max(1.0, g.norm()));
      // the constraint holds against every broken test function
      const double feas = (sys.B * res.hhat - g).norm();
      CHECK(feas <= 1e-9 * std::max(1.0, g.norm()));

      // dense oracle on the raw broken-indexed constraints
      const Eigen::MatrixXd qmat(Eigen::SparseMatrix<double>(sys.Mhat + sys.Khat));
      const Eigen::MatrixXd c = Eigen::MatrixXd(sys.B);
      const ConstrainedLsqResult oracle = constrained_lsq(qmat, q, c, g, 1e-10);
      CHECK((res.hhat - oracle.x).cwiseAbs().maxCoeff() <=
            1e-7 * std::max(1.0, oracle.x.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("recovery falls back to the dense path for poor multipliers") {
  const int k = 1;
  const Mesh mesh = generate_uniform_grid(2, {0, 0, M_PI, M_PI});
  const SystemMatrices sys = assemble(mesh, k, k + 1, 1.0, 1.0);  // degree k+1 < k+2
  const RecoverySolver recovery(mesh, sys);
  CHECK(!recovery.sparse_path());

  const Eigen::VectorXd h0 = random_vec(sys.mult.dim, 901);
  const Eigen::VectorXd g = sys.B * h0;
  const Eigen::VectorXd q = random_vec(sys.mult.dim, 902);
  const RecoverySolver::Result res = recovery.solve(q, g);
  CHECK((sys.B * res.hhat - g).norm() <= 1e-8 * std::max(1.0, g.norm()));
}

TEST_CASE("reduced rows reproduce the multiplier edge moments") {
  const int k = 2;
  const Mesh mesh = generate_uniform_grid(2, {0, 0, 2.0, 1.0});
  const SystemMatrices sys = assemble(mesh, k, k + 2, 1.0, 1.0);
  const RecoverySolver recovery(mesh, sys);

  const Eigen::VectorXd h = random_vec(sys.mult.dim, 777);
  // g := B h is consistent, and reduce_rhs must return exactly the edge
  // moments of h (the unique reduced representation of the constraint)
  double resid = 0.0;
  const Eigen::VectorXd c = recovery.reduce_rhs(sys.B * h, &resid);
  CHECK(resid <= 1e-10 * std::max(1.0, h.norm()));
  const Eigen::VectorXd mu = recovery.constraint_rows() * h;
  CHECK((c - mu).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, mu.cwiseAbs().maxCoeff()));
}
