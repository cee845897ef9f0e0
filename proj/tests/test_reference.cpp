#include <doctest.h>

#include <cmath>
#include <random>

#include "hybridem/reference.hpp"

using namespace hybridem;

TEST_CASE("modal basis is near-orthonormal (conditioning envelope)") {
  // Orthogonality degrades with the monomial Gram condition number; what
  // matters downstream is a well-conditioned span, not exact orthonormality.
  for (int k = 0; k <= 6; ++k) {
    const ScalarModalBasis& basis = scalar_modal(k);
    CHECK(basis.dim() == (k + 1) * (k + 2) / 2);
    const TriangleRule rule = gauss_triangle(2 * k + 2);
    Eigen::Matrix2Xd pts(2, rule.size());
    for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
    Eigen::MatrixXd vals;
    basis.eval(pts, vals);
    const Eigen::MatrixXd gram = vals * rule.weights.asDiagonal() * vals.transpose();
    const double dev =
        (gram - Eigen::MatrixXd::Identity(basis.dim(), basis.dim())).cwiseAbs().maxCoeff();
    CHECK(dev <= (k <= 4 ? 1e-10 : 1e-7));
  }
}

TEST_CASE("lagrange basis dimensions and unisolvence") {
  CHECK(lagrange_basis(0).dim() == 1);
  for (int m = 1; m <= 6; ++m) {
    const LagrangeBasis& basis = lagrange_basis(m);
    CHECK(basis.dim() == (m + 1) * (m + 2) / 2);
    Eigen::MatrixXd vals;
    basis.eval(basis.nodes(), vals);
    CHECK((vals - Eigen::MatrixXd::Identity(basis.dim(), basis.dim())).cwiseAbs().maxCoeff() <=
          1e-12);
  }
  // degree 3: 4 nodes on each edge including endpoints (trace degree 3)
  const LagrangeBasis& p3 = lagrange_basis(3);
  int on_edge0 = 0;
  for (int i = 0; i < p3.dim(); ++i) {
    const auto& info = p3.node_info()[i];
    if (info.kind == LagrangeBasis::NodeInfo::Edge && info.sub == 0) ++on_edge0;
    if (info.kind == LagrangeBasis::NodeInfo::Vertex && (info.sub == 1 || info.sub == 2))
      ++on_edge0;
  }
  CHECK(on_edge0 == 4);
}

TEST_CASE("edge element DOF counts and unisolvence") {
  SUBCASE("k=1: dimension 6, 2 per edge, 0 interior") {
    const BasisInfo info = make_basis(BasisFamily::EdgeBdm, 1);
    CHECK(info.dim == 6);
    CHECK(info.dofs_per_edge == 2);
    CHECK(info.interior_dofs == 0);
  }
  SUBCASE("vector-P k=1: dimension 6") {
    CHECK(make_basis(BasisFamily::VectorP, 1).dim == 6);
  }
  SUBCASE("unsupported families throw") {
    CHECK_THROWS_AS(make_basis(BasisFamily::VectorP, 9), std::invalid_argument);
    CHECK_THROWS_AS(make_basis(BasisFamily::ScalarLagrange, 7), std::invalid_argument);
  }
  for (int k = 1; k <= 5; ++k) {
    const EdgeElement& el = edge_element(k);
    CHECK(el.dim() == (k + 1) * (k + 2));
    CHECK(el.n_interior() == (k + 1) * (k - 1));
    const Eigen::MatrixXd id = el.dof_matrix() * el.dual_in_modal();
    CHECK((id - Eigen::MatrixXd::Identity(el.dim(), el.dim())).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("finite difference check on gradients") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(0.1, 0.35);
  const double h = 1e-5;
  for (int m = 1; m <= 6; ++m) {
    const LagrangeBasis& basis = lagrange_basis(m);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::Matrix2Xd pt(2, 1);
      pt << unif(rng), unif(rng);
      Eigen::MatrixXd gx, gy, vp, vm;
      basis.eval_grad(pt, gx, gy);
      for (int dir = 0; dir < 2; ++dir) {
        Eigen::Matrix2Xd pp = pt, pm = pt;
        pp(dir, 0) += h;
        pm(dir, 0) -= h;
        basis.eval(pp, vp);
        basis.eval(pm, vm);
        const Eigen::MatrixXd fd = (vp - vm) / (2 * h);
        CHECK((fd - ((dir == 0) ? gx : gy)).cwiseAbs().maxCoeff() <= 1e-6);
      }
    }
  }
}

TEST_CASE("curl coefficients match finite differences") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(0.1, 0.35);
  const double h = 1e-5;
  for (int k = 1; k <= 4; ++k) {
    const ScalarModalBasis& sm = scalar_modal(k);
    const ScalarModalBasis& dst = scalar_modal(k - 1);
    const Eigen::MatrixXd cc = curl_coefficients(k);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::Matrix2Xd pt(2, 1), px_p(2, 1), px_m(2, 1), py_p(2, 1), py_m(2, 1);
      pt << unif(rng), unif(rng);
      px_p = pt; px_p(0, 0) += h;
      px_m = pt; px_m(0, 0) -= h;
      py_p = pt; py_p(1, 0) += h;
      py_m = pt; py_m(1, 0) -= h;
      Eigen::MatrixXd v, vxp, vxm, vyp, vym, dv;
      sm.eval(pt, v);
      sm.eval(px_p, vxp);
      sm.eval(px_m, vxm);
      sm.eval(py_p, vyp);
      sm.eval(py_m, vym);
      dst.eval(pt, dv);
      // vector function (0, phi_i): curl = d phi_i / dx
      for (int i = 0; i < sm.dim(); ++i) {
        const double fd = (vxp(i, 0) - vxm(i, 0)) / (2 * h);
        const double viac = (cc.col(sm.dim() + i).transpose() * dv.col(0)).value();
        CHECK(std::abs(fd - viac) <= 1e-6);
      }
      // vector function (phi_i, 0): curl = -d phi_i / dy
      for (int i = 0; i < sm.dim(); ++i) {
        const double fd = -(vyp(i, 0) - vym(i, 0)) / (2 * h);
        const double viac = (cc.col(i).transpose() * dv.col(0)).value();
        CHECK(std::abs(fd - viac) <= 1e-6);
      }
    }
  }
}

TEST_CASE("grad of P_m lies in vector P_{m-1}") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0.05, 0.4);
  for (int m = 1; m <= 5; ++m) {
    const Eigen::MatrixXd gc = grad_coefficients(m);
    const ScalarModalBasis& src = scalar_modal(m);
    const ScalarModalBasis& dst = scalar_modal(m - 1);
    Eigen::Matrix2Xd pts(2, 8);
    for (int q = 0; q < 8; ++q) pts.col(q) = Eigen::Vector2d(unif(rng), unif(rng));
    Eigen::MatrixXd gx, gy, dv;
    src.eval_grad(pts, gx, gy);
    dst.eval(pts, dv);
    // reconstruction through the embedding must be exact (residual <= 1e-12)
    const Eigen::MatrixXd rx = gc.topRows(dst.dim()).transpose() * dv;
    const Eigen::MatrixXd ry = gc.bottomRows(dst.dim()).transpose() * dv;
    CHECK((rx - gx).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((ry - gy).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("shifted legendre parity and orthogonality") {
  const IntervalRule rule = gauss_interval(14);
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j) {
      double dot = 0.0;
      for (int q = 0; q < rule.size(); ++q)
        dot += rule.weights[q] * shifted_legendre(i, rule.points[q]) *
               shifted_legendre(j, rule.points[q]);
      if (i == j)
        CHECK(dot == doctest::Approx(1.0 / (2 * i + 1)).epsilon(1e-12));
      else
        CHECK(std::abs(dot) <= 1e-14);
    }
  for (int j = 0; j <= 6; ++j)
    CHECK(shifted_legendre(j, 0.25) ==
          doctest::Approx(std::pow(-1.0, j) * shifted_legendre(j, 0.75)).epsilon(1e-12));
}
