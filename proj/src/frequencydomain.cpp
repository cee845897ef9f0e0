#include "hybridem/frequencydomain.hpp"

#include <cmath>

#include "hybridem/diagnostics.hpp"
#include "hybridem/solvers.hpp"

namespace hybridem {

Eigen::Vector2d BenchmarkMode::potential(const Eigen::Vector2d& x) {
  const double c = std::sqrt(2.0) / M_PI;
  return {-c * std::cos(x.x()) * std::sin(x.y()), c * std::sin(x.x()) * std::cos(x.y())};
}

double BenchmarkMode::magnetic(const Eigen::Vector2d& x) {
  return 2.0 * std::sqrt(2.0) / M_PI * std::cos(x.x()) * std::cos(x.y());
}

Eigen::Vector2d BenchmarkMode::flux_proxy(const Eigen::Vector2d& x) {
  return std::sqrt(2.0) * potential(x);
}

EigenResult solve_eigenmode(const Mesh& mesh, const SystemMatrices& sys, double sigma,
                            double tol) {
  EigenResult res;
  res.r = sys.k + 1;

  const Eigen::SparseMatrix<double> pt = sys.conf.embedding.transpose();
  const Eigen::SparseMatrix<double> ar = pt * sys.A * sys.conf.embedding;
  const Eigen::SparseMatrix<double> mr = pt * sys.M_plain * sys.conf.embedding;

  const EigenPair pair = eigen_shift_invert(ar, mr, sigma, tol);
  res.omega2 = pair.value;
  res.eig_residual = pair.residual;
  res.a_reduced = pair.vector;  // already x^T M x = 1, i.e. unit L2 norm

  res.a_broken = sys.conf.embedding * res.a_reduced;
  const double align =
      inner_broken_vector(mesh, sys.k, res.a_broken, BenchmarkMode::potential, 2 * sys.k + 6);
  if (align < 0.0) {
    res.a_reduced = -res.a_reduced;
    res.a_broken = -res.a_broken;
  }
  return res;
}

void post_process(const Mesh& mesh, const SystemMatrices& sys, const RecoverySolver& recovery,
                  EigenResult& eig) {
  const double omega2 = eig.omega2;
  const double omega = std::sqrt(omega2);
  const int quad = 2 * (sys.k + 1) + 4;

  // constraint right side over all broken test functions
  const Eigen::VectorXd g = omega2 * (sys.M_plain * eig.a_broken) - sys.A * eig.a_broken;
  // objective: ||H_h - hhat||^2 + ||eps omega^2 A_h - curl hhat||^2
  const Eigen::VectorXd h_coeffs = (1.0 / sys.mu) * (sys.curl_map * eig.a_broken);
  const Eigen::VectorXd q =
      sys.W * h_coeffs + sys.R * ((sys.eps * omega2) * eig.a_broken);
  eig.hhat = recovery.solve(q, g).hhat;

  CellwiseVectorField curl_hhat = [&](int cell, const Eigen::Matrix2Xd& ref_pts) {
    const Eigen::Matrix2Xd grads = eval_multiplier_grad(mesh, sys.mult, eig.hhat, cell, ref_pts);
    Eigen::Matrix2Xd out(2, ref_pts.cols());
    for (Eigen::Index i = 0; i < ref_pts.cols(); ++i)
      out.col(i) = Eigen::Vector2d(grads(1, i), -grads(0, i)) / omega;
    return out;
  };
  eig.dhat = div_interpolate_cellwise(mesh, sys.div_degree, curl_hhat, quad);

  // benchmark errors
  const int err_quad = std::min(2 * (sys.k + 1) + 6, 20);
  eig.err_H =
      l2_error_broken_scalar(mesh, sys.k - 1, h_coeffs, BenchmarkMode::magnetic, err_quad);
  eig.err_Hhat =
      l2_error_multiplier(mesh, sys.mult, eig.hhat, BenchmarkMode::magnetic, err_quad);
  eig.err_D = l2_error_broken_vector(mesh, sys.k, (sys.eps * omega) * eig.a_broken,
                                     BenchmarkMode::flux_proxy, err_quad);
  const Eigen::VectorXd dhat_broken = sys.div.embedding * eig.dhat;
  eig.err_Dhat =
      l2_error_broken_vector(mesh, sys.div_degree, dhat_broken, BenchmarkMode::flux_proxy,
                             err_quad);
  eig.div_D = hdiv_seminorm(mesh, sys.k, (sys.eps * omega) * eig.a_broken, err_quad);
  eig.div_Dhat = hdiv_seminorm(mesh, sys.div_degree, dhat_broken, err_quad);
}

std::vector<ConvergenceRow> convergence_study(const std::vector<int>& rs,
                                              const std::vector<int>& ns, double sigma,
                                              double tol) {
  std::vector<ConvergenceRow> rows;
  const Rect domain{0.0, 0.0, M_PI, M_PI};
  for (int r : rs) {
    ConvergenceRow prev;
    bool have_prev = false;
    for (int n : ns) {
      const Mesh mesh = generate_uniform_grid(n, domain);
      const SystemMatrices sys = assemble(mesh, r - 1, r + 1, 1.0, 1.0);
      const RecoverySolver recovery(mesh, sys);
      EigenResult eig = solve_eigenmode(mesh, sys, sigma, tol);
      post_process(mesh, sys, recovery, eig);

      ConvergenceRow row;
      row.r = r;
      row.n = n;
      row.err_H = eig.err_H;
      row.err_Hhat = eig.err_Hhat;
      row.err_D = eig.err_D;
      row.err_Dhat = eig.err_Dhat;
      row.omega2 = eig.omega2;
      if (have_prev && prev.n * 2 == n) {
        row.rate_H = eoc(prev.err_H, row.err_H);
        row.rate_Hhat = eoc(prev.err_Hhat, row.err_Hhat);
        row.rate_D = eoc(prev.err_D, row.err_D);
        row.rate_Dhat = eoc(prev.err_Dhat, row.err_Dhat);
        row.has_rate = true;
      }
      rows.push_back(row);
      prev = row;
      have_prev = true;
    }
  }
  return rows;
}

}  // namespace hybridem
