#include "hybridem/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridem {

namespace {

Eigen::Matrix2Xd rule_points(const TriangleRule& rule) {
  Eigen::Matrix2Xd pts(2, rule.size());
  for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
  return pts;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string("diagnostics: NaN/Inf in ") + what);
}

}  // namespace

double hdiv_seminorm(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs, int quad_degree) {
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::VectorXd div = eval_broken_vector_div(mesh, k, coeffs, c, pts);
    const double det = geometry(mesh, c).det;
    for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * det * div[q] * div[q];
  }
  check_finite(sum, "hdiv_seminorm");
  return std::sqrt(sum);
}

double l2_norm_broken_vector(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                             int quad_degree) {
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::Matrix2Xd vals = eval_broken_vector(mesh, k, coeffs, c, pts);
    const double det = geometry(mesh, c).det;
    for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * det * vals.col(q).squaredNorm();
  }
  return std::sqrt(sum);
}

double l2_error_broken_vector(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                              const VectorField& exact, int quad_degree) {
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const Eigen::Matrix2Xd vals = eval_broken_vector(mesh, k, coeffs, c, pts);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d diff = vals.col(q) - exact(g.map(pts.col(q)));
      sum += rule.weights[q] * g.det * diff.squaredNorm();
    }
  }
  check_finite(sum, "l2_error_broken_vector");
  return std::sqrt(sum);
}

double l2_error_broken_scalar(const Mesh& mesh, int m, const Eigen::VectorXd& coeffs,
                              const ScalarField& exact, int quad_degree) {
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const Eigen::VectorXd vals = eval_broken_scalar(mesh, m, coeffs, c, pts);
    for (int q = 0; q < rule.size(); ++q) {
      const double diff = vals[q] - exact(g.map(pts.col(q)));
      sum += rule.weights[q] * g.det * diff * diff;
    }
  }
  check_finite(sum, "l2_error_broken_scalar");
  return std::sqrt(sum);
}

double l2_error_multiplier(const Mesh& mesh, const MultiplierMap& map,
                           const Eigen::VectorXd& coeffs, const ScalarField& exact,
                           int quad_degree) {
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const Eigen::VectorXd vals = eval_multiplier(mesh, map, coeffs, c, pts);
    for (int q = 0; q < rule.size(); ++q) {
      const double diff = vals[q] - exact(g.map(pts.col(q)));
      sum += rule.weights[q] * g.det * diff * diff;
    }
  }
  check_finite(sum, "l2_error_multiplier");
  return std::sqrt(sum);
}

double eoc(double err_coarse, double err_fine) { return std::log2(err_coarse / err_fine); }

double constraint_residual(const Mesh& mesh, const SystemMatrices& sys,
                           const Eigen::VectorXd& d_broken, const Eigen::VectorXd& dhat,
                           const ScalarField& rho, int quad_degree) {
  // int_K grad phi . D through the exact gradient embedding
  Eigen::VectorXd res = sys.G.transpose() * (sys.M_plain * d_broken);
  res += load_vector_broken_scalar(mesh, sys.scalar_degree, rho, quad_degree);
  res -= sys.beta * dhat;
  const double v = res.cwiseAbs().maxCoeff();
  check_finite(v, "constraint_residual");
  return v;
}

double flux_residual_max(const Mesh& mesh, const SystemMatrices& sys,
                         const Eigen::VectorXd& dhat, const ScalarField& rho, int quad_degree) {
  // the constant 1_K corresponds to modal function 0 scaled by its value
  Eigen::Matrix2Xd centroid(2, 1);
  centroid << 1.0 / 3.0, 1.0 / 3.0;
  Eigen::MatrixXd v0;
  scalar_modal(sys.scalar_degree).eval(centroid, v0);
  const double phi0 = v0(0, 0);

  const Eigen::VectorXd flux = sys.beta * dhat;
  const Eigen::VectorXd charge =
      load_vector_broken_scalar(mesh, sys.scalar_degree, rho, quad_degree);
  const int nss = scalar_modal(sys.scalar_degree).dim();
  double worst = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const long row = static_cast<long>(c) * nss;
    worst = std::max(worst, std::abs(flux[row] - charge[row]) / phi0);
  }
  check_finite(worst, "flux_residual_max");
  return worst;
}

double inner_broken_vector(const Mesh& mesh, int k, const Eigen::VectorXd& coeffs,
                           const VectorField& field, int quad_degree) {
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const Eigen::Matrix2Xd vals = eval_broken_vector(mesh, k, coeffs, c, pts);
    for (int q = 0; q < rule.size(); ++q)
      sum += rule.weights[q] * g.det * vals.col(q).dot(field(g.map(pts.col(q))));
  }
  return sum;
}

}  // namespace hybridem
