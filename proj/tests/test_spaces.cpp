#include <doctest.h>

#include <cmath>
#include <random>

#include "hybridem/assembly.hpp"

using namespace hybridem;

namespace {

const Rect kDomain{0.0, 0.0, M_PI, M_PI};

Eigen::Matrix2Xd random_ref_points(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> unif(0.05, 0.4);
  Eigen::Matrix2Xd pts(2, n);
  for (int q = 0; q < n; ++q) pts.col(q) = Eigen::Vector2d(unif(rng), unif(rng));
  return pts;
}

// tangential trace moments of a broken field on one side of an edge,
// against shifted Legendre in the global low->high parametrization
Eigen::VectorXd edge_trace_moments(const Mesh& mesh, int k, const Eigen::VectorXd& broken,
                                   int cell, int edge, int n_moments) {
  const CellGeometry g = geometry(mesh, cell);
  const IntervalRule rule = gauss_interval(2 * k + n_moments + 2);
  const Eigen::Vector2d lo = mesh.vertices[mesh.edges[edge][0]];
  const Eigen::Vector2d hi = mesh.vertices[mesh.edges[edge][1]];
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(n_moments);
  for (int i = 0; i < rule.size(); ++i) {
    const Eigen::Vector2d x = lo + rule.points[i] * (hi - lo);
    Eigen::Matrix2Xd ref(2, 1);
    ref.col(0) = g.unmap(x);
    const Eigen::Vector2d val = eval_broken_vector(mesh, k, broken, cell, ref).col(0);
    const double vt = val.dot(hi - lo);  // tangent weighted by |e|, matching the DOF
    for (int j = 0; j < n_moments; ++j)
      moments[j] += rule.weights[i] * vt * shifted_legendre(j, rule.points[i]);
  }
  return moments;
}

Eigen::VectorXd normal_trace_moments(const Mesh& mesh, int k, const Eigen::VectorXd& broken,
                                     int cell, int edge, int n_moments) {
  const CellGeometry g = geometry(mesh, cell);
  const IntervalRule rule = gauss_interval(2 * k + n_moments + 2);
  const Eigen::Vector2d lo = mesh.vertices[mesh.edges[edge][0]];
  const Eigen::Vector2d hi = mesh.vertices[mesh.edges[edge][1]];
  const Eigen::Vector2d t = hi - lo;
  const Eigen::Vector2d n(t.y(), -t.x());  // rotated tangent, |n| = |e|
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(n_moments);
  for (int i = 0; i < rule.size(); ++i) {
    const Eigen::Vector2d x = lo + rule.points[i] * (hi - lo);
    Eigen::Matrix2Xd ref(2, 1);
    ref.col(0) = g.unmap(x);
    const Eigen::Vector2d val = eval_broken_vector(mesh, k, broken, cell, ref).col(0);
    for (int j = 0; j < n_moments; ++j)
      moments[j] += rule.weights[i] * val.dot(n) * shifted_legendre(j, rule.points[i]);
  }
  return moments;
}

}  // namespace

TEST_CASE("space dimensions") {
  const Mesh m2 = generate_uniform_grid(2, kDomain);
  CHECK(build_space(m2, SpaceKind::ConformingEdge, 1).dim == 16);
  CHECK(build_space(m2, SpaceKind::MultiplierLagrange, 1).dim == 9);
  const Mesh m16 = generate_uniform_grid(16, kDomain);
  CHECK(build_space(m16, SpaceKind::BrokenVector, 1).dim == 512 * 6);
  CHECK(build_space(m2, SpaceKind::BrokenScalar, 2).dim == 8 * 6);
  CHECK(build_space(m2, SpaceKind::DivConforming, 2).dim == 16 * 3 + 8 * 3);
  CHECK_THROWS_AS(build_space(m2, SpaceKind::BrokenVector, 9), std::invalid_argument);
}

TEST_CASE("multiplier map is continuous across cells") {
  const Mesh mesh = generate_uniform_grid(2, kDomain);
  for (int m : {1, 2, 3, 4}) {
    const MultiplierMap map = multiplier_map(mesh, m);
    std::mt19937 rng(101 + m);
    std::normal_distribution<double> dist;
    Eigen::VectorXd coeffs(map.dim);
    for (long i = 0; i < map.dim; ++i) coeffs[i] = dist(rng);
    const IntervalRule rule = gauss_interval(8);
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (mesh.boundary_edge[e]) continue;
      const Eigen::Vector2d lo = mesh.vertices[mesh.edges[e][0]];
      const Eigen::Vector2d hi = mesh.vertices[mesh.edges[e][1]];
      for (int i = 0; i < rule.size(); ++i) {
        const Eigen::Vector2d x = lo + rule.points[i] * (hi - lo);
        double vals[2];
        for (int side = 0; side < 2; ++side) {
          const int c = mesh.edge_cells[e][side];
          Eigen::Matrix2Xd ref(2, 1);
          ref.col(0) = geometry(mesh, c).unmap(x);
          vals[side] = eval_multiplier(mesh, map, coeffs, c, ref)[0];
        }
        CHECK(std::abs(vals[0] - vals[1]) <= 1e-11);
      }
    }
  }
}

TEST_CASE("conforming embedding: tangential continuity and unit DOFs") {
  for (int k : {1, 2, 3}) {
    const Mesh mesh = generate_uniform_grid(2, kDomain);
    const ConformingEdgeMap conf = conforming_edge_map(mesh, k);
    CHECK(conf.dim ==
          mesh.num_interior_edges() * (k + 1) + mesh.num_cells() * (k + 1) * (k - 1));

    std::mt19937 rng(7 + k);
    std::normal_distribution<double> dist;
    Eigen::VectorXd c(conf.dim);
    for (long i = 0; i < conf.dim; ++i) c[i] = dist(rng);
    const Eigen::VectorXd broken = conf.embedding * c;

    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (mesh.boundary_edge[e]) {
        const Eigen::VectorXd m =
            edge_trace_moments(mesh, k, broken, mesh.edge_cells[e][0], e, k + 1);
        CHECK(m.cwiseAbs().maxCoeff() <= 1e-11);
      } else {
        const Eigen::VectorXd m0 =
            edge_trace_moments(mesh, k, broken, mesh.edge_cells[e][0], e, k + 1);
        const Eigen::VectorXd m1 =
            edge_trace_moments(mesh, k, broken, mesh.edge_cells[e][1], e, k + 1);
        CHECK((m0 - m1).cwiseAbs().maxCoeff() <= 1e-11);
        for (int j = 0; j <= k; ++j) {
          const long idx = static_cast<long>(conf.interior_edge_index[e]) * (k + 1) + j;
          CHECK(m0[j] == doctest::Approx(c[idx]).epsilon(1e-9));
        }
      }
    }

    const Eigen::MatrixXd dense(conf.embedding);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dense);
    CHECK(qr.rank() == conf.dim);
  }
}

TEST_CASE("div-conforming embedding: normal continuity and exact interpolation") {
  for (int k : {1, 2, 3}) {
    const Mesh mesh = generate_uniform_grid(2, kDomain);
    const DivConformingMap div = div_conforming_map(mesh, k);
    CHECK(div.dim == mesh.num_edges() * (k + 1) + mesh.num_cells() * (k + 1) * (k - 1));

    std::mt19937 rng(19 + k);
    std::normal_distribution<double> dist;
    Eigen::VectorXd c(div.dim);
    for (long i = 0; i < div.dim; ++i) c[i] = dist(rng);
    const Eigen::VectorXd broken = div.embedding * c;

    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (mesh.boundary_edge[e]) continue;
      const Eigen::VectorXd m0 =
          normal_trace_moments(mesh, k, broken, mesh.edge_cells[e][0], e, k + 1);
      const Eigen::VectorXd m1 =
          normal_trace_moments(mesh, k, broken, mesh.edge_cells[e][1], e, k + 1);
      CHECK((m0 - m1).cwiseAbs().maxCoeff() <= 1e-11);
    }

    CellwiseVectorField member = [&](int cell, const Eigen::Matrix2Xd& pts) {
      return eval_broken_vector(mesh, k, broken, cell, pts);
    };
    const Eigen::VectorXd back = div_interpolate_cellwise(mesh, k, member, 2 * k + 4);
    CHECK((back - c).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff()));

    VectorField poly = [k](const Eigen::Vector2d& x) {
      return Eigen::Vector2d(std::pow(x.x(), k) + x.y(), x.x() - 2.0 * std::pow(x.y(), k));
    };
    const Eigen::VectorXd coeffs = div_interpolate(mesh, k, poly, 2 * k + 6);
    const Eigen::VectorXd pb = div.embedding * coeffs;
    std::mt19937 rng2(3);
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
      const Eigen::Matrix2Xd pts = random_ref_points(rng2, 4);
      const Eigen::Matrix2Xd vals = eval_broken_vector(mesh, k, pb, cell, pts);
      const CellGeometry g = geometry(mesh, cell);
      for (int q = 0; q < 4; ++q) {
        const Eigen::Vector2d exact = poly(g.map(pts.col(q)));
        CHECK((vals.col(q) - exact).norm() <= 1e-10 * std::max(1.0, exact.norm()));
      }
    }
  }
}

TEST_CASE("grad embedding is exact") {
  const Mesh mesh = generate_uniform_grid(2, kDomain);
  for (int m : {2, 3}) {
    const Eigen::SparseMatrix<double> g = grad_embedding(mesh, m);
    const int ns = scalar_modal(m).dim();
    std::mt19937 rng(23 + m);
    std::normal_distribution<double> dist;
    Eigen::VectorXd c(static_cast<long>(mesh.num_cells()) * ns);
    for (long i = 0; i < c.size(); ++i) c[i] = dist(rng);

    const Eigen::VectorXd gc = g * c;
    std::mt19937 rng2(5);
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
      const Eigen::Matrix2Xd pts = random_ref_points(rng2, 3);
      const Eigen::Matrix2Xd grads = eval_broken_scalar_grad(mesh, m, c, cell, pts);
      const Eigen::Matrix2Xd vec = eval_broken_vector(mesh, m - 1, gc, cell, pts);
      CHECK((grads - vec).cwiseAbs().maxCoeff() <=
            1e-11 * std::max(1.0, c.cwiseAbs().maxCoeff()));
    }
  }
  // gradient of a constant vanishes
  const Eigen::SparseMatrix<double> g2 = grad_embedding(mesh, 2);
  const int ns2 = scalar_modal(2).dim();
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(static_cast<long>(mesh.num_cells()) * ns2);
  for (int cell = 0; cell < mesh.num_cells(); ++cell) ones[cell * ns2] = 1.0;
  CHECK((g2 * ones).cwiseAbs().maxCoeff() <= 1e-13);

  // phi(x, y) = x maps to the constant field (1, 0)
  const Eigen::VectorXd phi_x =
      project_broken_scalar(mesh, 2, [](const Eigen::Vector2d& x) { return x.x(); }, 8);
  const Eigen::VectorXd grad_phi = g2 * phi_x;
  Eigen::Matrix2Xd centroid(2, 1);
  centroid << 1.0 / 3.0, 1.0 / 3.0;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const Eigen::Vector2d v = eval_broken_vector(mesh, 1, grad_phi, cell, centroid).col(0);
    CHECK((v - Eigen::Vector2d(1.0, 0.0)).norm() <= 1e-12);
  }
}

TEST_CASE("curl matrix is exact") {
  const Mesh mesh = generate_uniform_grid(2, kDomain);
  const int k = 2;
  const Eigen::SparseMatrix<double> cm = curl_matrix(mesh, k);
  std::mt19937 rng(31);
  std::normal_distribution<double> dist;
  Eigen::VectorXd c(static_cast<long>(mesh.num_cells()) * 2 * scalar_modal(k).dim());
  for (long i = 0; i < c.size(); ++i) c[i] = dist(rng);
  const Eigen::VectorXd cc = cm * c;
  std::mt19937 rng2(6);
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const Eigen::Matrix2Xd pts = random_ref_points(rng2, 3);
    const Eigen::VectorXd direct = eval_broken_vector_curl(mesh, k, c, cell, pts);
    const Eigen::VectorXd via = eval_broken_scalar(mesh, k - 1, cc, cell, pts);
    CHECK((direct - via).cwiseAbs().maxCoeff() <= 1e-11);
  }
}

TEST_CASE("embedded_coefficients recovers members") {
  const Mesh mesh = generate_uniform_grid(2, kDomain);
  const ConformingEdgeMap conf = conforming_edge_map(mesh, 2);
  std::mt19937 rng(41);
  std::normal_distribution<double> dist;
  Eigen::VectorXd c(conf.dim);
  for (long i = 0; i < conf.dim; ++i) c[i] = dist(rng);
  double resid = -1.0;
  const Eigen::VectorXd back = embedded_coefficients(conf.embedding, conf.embedding * c, &resid);
  CHECK((back - c).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(resid <= 1e-10);
}
