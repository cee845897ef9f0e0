#include "hybridem/selfcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hybridem/diagnostics.hpp"
#include "hybridem/frequencydomain.hpp"
#include "hybridem/solvers.hpp"
#include "hybridem/timedomain.hpp"

namespace hybridem {

namespace {

CheckResult make(const std::string& name, bool pass, double worst, double tol) {
  std::ostringstream os;
  os << "worst " << worst << " (tol " << tol << ")";
  return {name, pass, os.str()};
}

CheckResult check_quadrature() {
  double worst = 0.0;
  for (int d = 0; d <= 12; ++d) {
    const TriangleRule rule = gauss_triangle(d);
    for (int a = 0; a + 0 <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double val = 0.0;
        for (int q = 0; q < rule.size(); ++q)
          val += rule.weights[q] * std::pow(rule.bary(q, 1), a) * std::pow(rule.bary(q, 2), b);
        const double exact = monomial_integral(a, b);
        worst = std::max(worst, std::abs(val - exact) / std::abs(exact));
      }
  }
  return make("quadrature monomial exactness", worst <= 1e-13, worst, 1e-13);
}

CheckResult check_unisolvence() {
  double worst = 0.0;
  for (int m = 0; m <= 6; ++m) {
    const LagrangeBasis& basis = lagrange_basis(m);
    Eigen::MatrixXd vals;
    basis.eval(basis.nodes(), vals);
    worst = std::max(worst,
                     (vals - Eigen::MatrixXd::Identity(basis.dim(), basis.dim())).cwiseAbs().maxCoeff());
  }
  for (int k = 1; k <= 5; ++k) {
    const EdgeElement& el = edge_element(k);
    const Eigen::MatrixXd id = el.dof_matrix() * el.dual_in_modal();
    worst = std::max(worst, (id - Eigen::MatrixXd::Identity(el.dim(), el.dim())).cwiseAbs().maxCoeff());
  }
  return make("basis unisolvence", worst <= 1e-12, worst, 1e-12);
}

CheckResult check_derivatives() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.15, 0.3);
  const double step = 1e-5;
  double worst = 0.0;
  for (int m = 1; m <= 6; ++m) {
    const LagrangeBasis& basis = lagrange_basis(m);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::Matrix2Xd pt(2, 1);
      pt << unif(rng), unif(rng);
      Eigen::MatrixXd gx, gy, vp, vmn;
      basis.eval_grad(pt, gx, gy);
      for (int dir = 0; dir < 2; ++dir) {
        Eigen::Matrix2Xd pp = pt, pm = pt;
        pp(dir, 0) += step;
        pm(dir, 0) -= step;
        basis.eval(pp, vp);
        basis.eval(pm, vmn);
        const Eigen::MatrixXd fd = (vp - vmn) / (2.0 * step);
        const Eigen::MatrixXd& an = (dir == 0) ? gx : gy;
        worst = std::max(worst, (fd - an).cwiseAbs().maxCoeff());
      }
    }
  }
  return make("derivative finite differences", worst <= 1e-6, worst, 1e-6);
}

CheckResult check_grad_inclusion() {
  // grad P_m lies in vector P_{m-1}: the expansion reproduces gradients
  double worst = 0.0;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(0.05, 0.4);
  for (int m = 1; m <= 5; ++m) {
    const Eigen::MatrixXd coeff = grad_coefficients(m);
    const ScalarModalBasis& src = scalar_modal(m);
    const ScalarModalBasis& dst = scalar_modal(m - 1);
    Eigen::Matrix2Xd pts(2, 5);
    for (int q = 0; q < 5; ++q) pts.col(q) = Eigen::Vector2d(unif(rng), unif(rng));
    Eigen::MatrixXd gx, gy, dv;
    src.eval_grad(pts, gx, gy);
    dst.eval(pts, dv);
    const Eigen::MatrixXd ex = (coeff.topRows(dst.dim()).transpose() * dv).transpose();
    const Eigen::MatrixXd ey = (coeff.bottomRows(dst.dim()).transpose() * dv).transpose();
    worst = std::max(worst, (ex - gx.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (ey - gy.transpose()).cwiseAbs().maxCoeff());
  }
  return make("gradient inclusion", worst <= 1e-12, worst, 1e-12);
}

CheckResult check_mesh_invariants() {
  double worst = 0.0;
  bool counts_ok = true;
  for (int n : {1, 2, 4}) {
    const Rect dom{0.0, 0.0, M_PI, M_PI};
    const Mesh mesh = generate_uniform_grid(n, dom);
    counts_ok = counts_ok && mesh.num_vertices() == (n + 1) * (n + 1) &&
                mesh.num_cells() == 2 * n * n && mesh.num_edges() == 3 * n * n + 2 * n &&
                mesh.num_boundary_edges() == 4 * n &&
                (mesh.num_vertices() - mesh.num_edges() + mesh.num_cells()) == 1;
    double area = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) area += triangle_area(mesh, c);
    worst = std::max(worst, std::abs(area - dom.area()) / dom.area());
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const int expect = mesh.boundary_edge[e] ? 1 : 2;
      const int got = (mesh.edge_cells[e][1] == -1) ? 1 : 2;
      counts_ok = counts_ok && expect == got;
    }
  }
  return make("mesh invariants", counts_ok && worst <= 1e-12, worst, 1e-12);
}

CheckResult check_kernel_identity() {
  double worst = 0.0;
  for (int r : {2, 3, 4, 5}) {
    for (int n : {1, 2, 4}) {
      const Mesh mesh = generate_uniform_grid(n, {0.0, 0.0, M_PI, M_PI});
      const SystemMatrices sys = assemble(mesh, r - 1, r + 1, 1.0, 1.0);
      const Eigen::SparseMatrix<double> bp = Eigen::SparseMatrix<double>(sys.B.transpose()) *
                                             sys.conf.embedding;
      const double bscale = Eigen::MatrixXd(sys.B).cwiseAbs().maxCoeff();
      worst = std::max(worst, Eigen::MatrixXd(bp).cwiseAbs().maxCoeff() / bscale);
    }
  }
  return make("kernel identity B P = 0", worst <= 1e-12, worst, 1e-12);
}

CheckResult check_assembly() {
  const Mesh mesh = generate_uniform_grid(3, {0.0, 0.0, M_PI, M_PI});
  const SystemMatrices sys = assemble(mesh, 2, 4, 1.0, 1.0);
  double worst = 0.0;
  auto asym = [](const Eigen::SparseMatrix<double>& m) {
    return Eigen::MatrixXd(Eigen::SparseMatrix<double>(m - Eigen::SparseMatrix<double>(m.transpose())))
        .cwiseAbs()
        .maxCoeff();
  };
  worst = std::max(worst, asym(sys.M_plain));
  worst = std::max(worst, asym(sys.A));
  worst = std::max(worst, asym(sys.Mhat));
  worst = std::max(worst, asym(sys.Khat));
  return make("assembly symmetry", worst <= 1e-13, worst, 1e-13);
}

CheckResult check_constrained_lsq() {
  std::mt19937 rng(29);
  std::normal_distribution<double> dist;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 40, m = 25, rank = 20;
    Eigen::MatrixXd l(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) l(i, j) = dist(rng);
    const Eigen::MatrixXd qmat = l * l.transpose();
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = dist(rng);
    Eigen::MatrixXd c0(rank, n), mix(m, rank);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < n; ++j) c0(i, j) = dist(rng);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < rank; ++j) mix(i, j) = dist(rng);
    const Eigen::MatrixXd c = mix * c0;
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0[i] = dist(rng);
    const Eigen::VectorXd g = c * x0;  // consistent by construction

    const ConstrainedLsqResult res = constrained_lsq(qmat, q, c, g, 1e-10);
    // KKT via a dense pseudo-inverse oracle
    worst = std::max(worst, (c * res.x - g).norm() / g.norm());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
    const Eigen::MatrixXd nullb = svd.matrixV().rightCols(n - rank);
    worst = std::max(worst, (nullb.transpose() * (qmat * res.x - q)).norm() /
                                std::max(1.0, q.norm()));
  }
  return make("constrained lsq KKT oracle", worst <= 1e-9, worst, 1e-9);
}

CheckResult check_conservation_short() {
  const Mesh mesh = generate_uniform_grid(2, {0.0, 0.0, M_PI, M_PI});
  const TimeDomainProblem problem = setup_time_domain(mesh, 2, 3, 1.0, 1.0);
  const Eigen::VectorXd a0_broken = project_broken_vector(
      mesh, 1,
      [](const Eigen::Vector2d& x) {
        return Eigen::Vector2d(x.y() * (M_PI - x.y()), x.x() * (M_PI - x.x()));
      },
      8);
  double resid = 0.0;
  const Eigen::VectorXd a0 = embedded_coefficients(problem.kernel, a0_broken, &resid);
  TimeState state = make_initial_state(problem, a0,
                                       Eigen::VectorXd::Zero(problem.reduced_dim()),
                                       Eigen::VectorXd::Zero(problem.sys.div.dim));
  const TimeDomainResult result =
      run_leapfrog(problem, std::move(state), M_PI / 64.0, 16, zero_sources());
  double worst = 0.0;
  for (const auto& rec : result.records) {
    worst = std::max(worst, rec.seminorm_Dhat);
    worst = std::max(worst, rec.constraint_residual);
  }
  return make("short conservation run", worst <= 1e-10, worst, 1e-10);
}

}  // namespace

std::vector<CheckResult> run_all_checks() {
  std::vector<CheckResult> out;
  out.push_back(check_quadrature());
  out.push_back(check_unisolvence());
  out.push_back(check_derivatives());
  out.push_back(check_grad_inclusion());
  out.push_back(check_mesh_invariants());
  out.push_back(check_kernel_identity());
  out.push_back(check_assembly());
  out.push_back(check_constrained_lsq());
  out.push_back(check_conservation_short());
  return out;
}

}  // namespace hybridem
