#include <doctest.h>

#include <cmath>
#include <random>

#include "hybridem/assembly.hpp"
#include "hybridem/solvers.hpp"

using namespace hybridem;

namespace {

Eigen::MatrixXd random_dense(long rows, long cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

Eigen::VectorXd random_vec(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("solve_spd basics") {
  SUBCASE("identity") {
    Eigen::SparseMatrix<double> id(3, 3);
    id.setIdentity();
    const Eigen::VectorXd b = random_vec(3, 1);
    CHECK((solve_spd(id, b) - b).norm() <= 1e-14);
  }
  SUBCASE("diagonal") {
    Eigen::SparseMatrix<double> d(2, 2);
    d.insert(0, 0) = 2.0;
    d.insert(1, 1) = 3.0;
    Eigen::VectorXd b(2);
    b << 2.0, 3.0;
    const Eigen::VectorXd x = solve_spd(d, b);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("random SPD 50x50 built as L L^T") {
    Eigen::MatrixXd l = random_dense(50, 50, 5);
    l = l.triangularView<Eigen::Lower>();
    for (int i = 0; i < 50; ++i) l(i, i) = std::abs(l(i, i)) + 1.0;
    const Eigen::MatrixXd a = l * l.transpose();
    const Eigen::SparseMatrix<double> as = a.sparseView();
    const Eigen::VectorXd b = random_vec(50, 6);
    const Eigen::VectorXd x = solve_spd(as, b);
    CHECK((a * x - b).norm() <= 1e-10 * (a.norm() * x.norm() + b.norm()));
  }
  SUBCASE("indefinite matrix is rejected") {
    Eigen::SparseMatrix<double> m(2, 2);
    m.insert(0, 0) = 1.0;
    m.insert(1, 1) = -1.0;
    CHECK_THROWS(solve_spd(m, Eigen::VectorXd::Zero(2)));
  }
}

TEST_CASE("constrained_lsq") {
  SUBCASE("projection onto a single constraint") {
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd c(1, 2);
    c << 1.0, 1.0;
    Eigen::VectorXd g(1);
    g << 2.0;
    const auto res = constrained_lsq(q, Eigen::VectorXd::Zero(2), c, g);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("no constraints: pseudo-inverse minimizer") {
    Eigen::MatrixXd q(2, 2);
    q << 2, 0, 0, 3;
    Eigen::VectorXd qv(2);
    qv << 4, 9;
    const auto res = constrained_lsq(q, qv, Eigen::MatrixXd(0, 2), Eigen::VectorXd(0));
    CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.x[1] == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("random consistent rank-deficient system vs dense oracle") {
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 40, m = 25, rank = 20;
      const Eigen::MatrixXd l = random_dense(n, n, 50 + trial);
      const Eigen::MatrixXd qmat = l * l.transpose();
      const Eigen::VectorXd qv = random_vec(n, 60 + trial);
      const Eigen::MatrixXd c = random_dense(m, rank, 70 + trial) *
                                random_dense(rank, n, 80 + trial);
      const Eigen::VectorXd g = c * random_vec(n, 90 + trial);
      const auto res = constrained_lsq(qmat, qv, c, g, 1e-10);
      CHECK(res.rank_c == rank);
      CHECK((c * res.x - g).norm() <= 1e-9 * std::max(1.0, g.norm()));
      // KKT stationarity against the dense null-space oracle
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
      const Eigen::MatrixXd nb = svd.matrixV().rightCols(n - rank);
      CHECK((nb.transpose() * (qmat * res.x - qv)).norm() <=
            1e-9 * std::max(1.0, qv.norm()) * qmat.norm());
    }
  }
  SUBCASE("minimum-norm tie-break on a singular reduced problem") {
    // Q acts only on the first coordinate; the feasible set is a line in the
    // null directions. Any minimizer has x0 fixed; min-norm picks zeros.
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 3);
    q(0, 0) = 1.0;
    Eigen::VectorXd qv = Eigen::VectorXd::Zero(3);
    qv[0] = 2.0;
    const auto res = constrained_lsq(q, qv, Eigen::MatrixXd(0, 3), Eigen::VectorXd(0));
    CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(res.x[1]) <= 1e-12);
    CHECK(std::abs(res.x[2]) <= 1e-12);

    // with one constraint x0 + x1 + x2 = 3, minimizers fix x0 = 2 (from Q)
    // only in the projected sense; check min-norm against brute force
    Eigen::MatrixXd c(1, 3);
    c << 1, 1, 1;
    Eigen::VectorXd g(1);
    g << 3.0;
    const auto res2 = constrained_lsq(q, qv, c, g);
    // minimizers: minimize (x0-2)^2/2 ... subject to the sum; the objective
    // ignores x1, x2, so x0 = 2 and x1 + x2 = 1; min-norm: x1 = x2 = 0.5
    CHECK(res2.x[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(res2.x[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(res2.x[2] == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("minimum-norm property against other stationary feasible points") {
    // Q and C share null directions; perturbing the solution along
    // null(C) ∩ null(Q) keeps stationarity and feasibility but grows the norm
    std::mt19937 rng(777);
    std::normal_distribution<double> dist;
    const int n = 20;
    Eigen::MatrixXd base = random_dense(12, n, 71);
    const Eigen::MatrixXd qmat = base.transpose() * base;  // rank 12
    const Eigen::MatrixXd c = random_dense(5, 12, 72) * base;  // null(Q) subset null(C)
    const Eigen::VectorXd qv = base.transpose() * random_vec(12, 73);
    const Eigen::VectorXd g = c * random_vec(n, 74);
    const auto res = constrained_lsq(qmat, qv, c, g, 1e-10);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(base, Eigen::ComputeFullV);
    const Eigen::MatrixXd shared_null = svd.matrixV().rightCols(n - 12);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd other = res.x + shared_null * random_vec(n - 12, 80 + trial);
      CHECK((c * other - g).norm() <= 1e-9 * std::max(1.0, g.norm()));
      CHECK(res.x.norm() <= other.norm() + 1e-9);
    }
  }
  SUBCASE("inconsistent constraints throw") {
    Eigen::MatrixXd c(2, 1);
    c << 1.0, 1.0;
    Eigen::VectorXd g(2);
    g << 0.0, 1.0;
    CHECK_THROWS(constrained_lsq(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), c, g));
  }
}

TEST_CASE("nullspace_basis") {
  SUBCASE("zero matrix gives a full orthonormal basis") {
    Eigen::SparseMatrix<double> b(5, 3);
    const Eigen::MatrixXd z = nullspace_basis(b);
    CHECK(z.cols() == 5);
    CHECK((z.transpose() * z - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-13);
  }
  SUBCASE("kernel of B^T matches the conforming space") {
    const Mesh mesh = generate_uniform_grid(2, {0, 0, M_PI, M_PI});
    const SystemMatrices sys = assemble(mesh, 1, 3, 1.0, 1.0);
    const Eigen::MatrixXd z = nullspace_basis(sys.B, 1e-10);
    CHECK(z.cols() == sys.conf.dim);  // nullity equals the conforming dimension
    // span(Z) = span(P): projection distance
    const Eigen::MatrixXd p(sys.conf.embedding);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(p);
    const Eigen::MatrixXd qthin =
        qr.householderQ() * Eigen::MatrixXd::Identity(p.rows(), p.cols());
    const double dist = (z - qthin * (qthin.transpose() * z)).cwiseAbs().maxCoeff();
    CHECK(dist <= 1e-10);
  }
  SUBCASE("multiplier degree k+1 leaves a larger kernel") {
    const Mesh mesh = generate_uniform_grid(2, {0, 0, M_PI, M_PI});
    const SystemMatrices sys = assemble(mesh, 1, 2, 1.0, 1.0);
    const Eigen::MatrixXd z = nullspace_basis(sys.B, 1e-10);
    CHECK(z.cols() > 16);
  }
}

TEST_CASE("eigen_shift_invert") {
  SUBCASE("diagonal pencil") {
    Eigen::SparseMatrix<double> a(3, 3), m(3, 3);
    a.insert(0, 0) = 1.0;
    a.insert(1, 1) = 2.0;
    a.insert(2, 2) = 4.0;
    m.setIdentity();
    const EigenPair pair = eigen_shift_invert(a, m, 1.9);
    CHECK(pair.value == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("random SPD pencil vs dense oracle") {
    const int n = 100;
    Eigen::MatrixXd la = random_dense(n, n, 123);
    const Eigen::MatrixXd a = la * la.transpose();
    Eigen::MatrixXd lm = random_dense(n, n, 321);
    const Eigen::MatrixXd m = lm * lm.transpose() + 10.0 * Eigen::MatrixXd::Identity(n, n);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, m);
    const Eigen::VectorXd evs = ges.eigenvalues();
    const double target = evs[n / 2];
    const double gap_lo = evs[n / 2 - 1], gap_hi = evs[n / 2 + 1];
    const double sigma = target + 0.2 * std::min(target - gap_lo, gap_hi - target);
    const EigenPair pair =
        eigen_shift_invert(a.sparseView(), m.sparseView(), sigma, 1e-12, 500);
    CHECK(std::abs(pair.value - target) <= 1e-9 * std::abs(target));
    CHECK(pair.vector.dot(m * pair.vector) == doctest::Approx(1.0).epsilon(1e-10));
  }
}
