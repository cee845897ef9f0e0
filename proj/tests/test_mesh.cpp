#include <doctest.h>

#include <cmath>

#include "hybridem/mesh.hpp"

using namespace hybridem;

TEST_CASE("uniform grid counts") {
  SUBCASE("N=16 on (0,pi)^2 has 512 cells") {
    const Mesh mesh = generate_uniform_grid(16, {0, 0, M_PI, M_PI});
    CHECK(mesh.num_cells() == 512);
    CHECK(mesh.num_vertices() == 17 * 17);
    CHECK(mesh.num_edges() == 3 * 256 + 32);
    CHECK(mesh.num_boundary_edges() == 64);
  }
  SUBCASE("N=1 satisfies the Euler relation") {
    const Mesh mesh = generate_uniform_grid(1, {0, 0, 1, 1});
    CHECK(mesh.num_cells() == 2);
    CHECK(mesh.num_edges() == 5);
    CHECK(mesh.num_vertices() == 4);
    CHECK(mesh.num_vertices() - mesh.num_edges() + mesh.num_cells() == 1);
  }
  SUBCASE("N=2 connectivity") {
    const Mesh mesh = generate_uniform_grid(2, {0, 0, M_PI, M_PI});
    CHECK(mesh.num_cells() == 8);
    CHECK(mesh.num_edges() == 16);
    CHECK(mesh.num_vertices() == 9);
    CHECK(mesh.num_boundary_edges() == 8);
    CHECK(mesh.num_interior_edges() == 8);
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(generate_uniform_grid(0, {0, 0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(generate_uniform_grid(4, {0, 0, 0, 1}), std::invalid_argument);
}

TEST_CASE("mesh invariants") {
  for (int n : {1, 2, 3, 5}) {
    const Rect dom{0, 0, M_PI, M_PI};
    const Mesh mesh = generate_uniform_grid(n, dom);

    double area = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const double a = triangle_area(mesh, c);
      CHECK(a > 0.0);
      area += a;
    }
    CHECK(area == doctest::Approx(dom.area()).epsilon(1e-12));
    CHECK(mesh.num_boundary_edges() == 4 * n);

    for (int e = 0; e < mesh.num_edges(); ++e) {
      CHECK(mesh.edges[e][0] < mesh.edges[e][1]);
      CHECK((mesh.edge_cells[e][1] == -1) == (mesh.boundary_edge[e] != 0));
    }
    // sign convention: +1 iff local traversal goes low -> high
    for (int c = 0; c < mesh.num_cells(); ++c)
      for (int a = 0; a < 3; ++a) {
        auto [p, q] = mesh.local_edge_vertices(c, a);
        CHECK(mesh.cell_edge_sign[c][a] == ((p < q) ? 1 : -1));
        const int e = mesh.cell_edges[c][a];
        CHECK(std::min(p, q) == mesh.edges[e][0]);
        CHECK(std::max(p, q) == mesh.edges[e][1]);
      }
  }
}

TEST_CASE("generation is deterministic") {
  const Mesh a = generate_uniform_grid(4, {0, 0, 2, 3});
  const Mesh b = generate_uniform_grid(4, {0, 0, 2, 3});
  REQUIRE(a.num_vertices() == b.num_vertices());
  for (int i = 0; i < a.num_vertices(); ++i) CHECK(a.vertices[i] == b.vertices[i]);
  REQUIRE(a.num_edges() == b.num_edges());
  for (int e = 0; e < a.num_edges(); ++e) CHECK(a.edges[e] == b.edges[e]);
}

TEST_CASE("cell geometry") {
  const Mesh mesh = generate_uniform_grid(2, {0, 0, M_PI, M_PI});
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    CHECK(g.det == doctest::Approx((M_PI / 2) * (M_PI / 2)).epsilon(1e-14));
    for (int a = 0; a < 3; ++a) {
      CHECK(std::abs(g.normal[a].norm() - 1.0) <= 1e-14);
      CHECK(std::abs(g.tangent[a].norm() - 1.0) <= 1e-14);
      CHECK(std::abs(g.normal[a].dot(g.tangent[a])) <= 1e-14);
      // t = (-n_y, n_x)
      CHECK(g.tangent[a].x() == doctest::Approx(-g.normal[a].y()).epsilon(1e-14));
      CHECK(g.tangent[a].y() == doctest::Approx(g.normal[a].x()).epsilon(1e-14));
      // outward: points away from the opposite vertex
      const auto [p, q] = mesh.local_edge_vertices(c, a);
      const Eigen::Vector2d mid = 0.5 * (mesh.vertices[p] + mesh.vertices[q]);
      const Eigen::Vector2d opp = mesh.vertices[mesh.tris[c][a]];
      CHECK(g.normal[a].dot(mid - opp) > 0.0);
    }
  }
  // hypotenuse normal of a right triangle with legs on the axes
  const Mesh unit = generate_uniform_grid(1, {0, 0, 1, 1});
  const CellGeometry g0 = geometry(unit, 0);  // (0,0),(1,0),(1,1): vertical, diag, bottom
  bool found = false;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(g0.edge_length[a] - std::sqrt(2.0)) < 1e-12) {
      found = true;
      CHECK(std::abs(std::abs(g0.normal[a].x()) - 1.0 / std::sqrt(2.0)) <= 1e-14);
      CHECK(std::abs(std::abs(g0.normal[a].y()) - 1.0 / std::sqrt(2.0)) <= 1e-14);
    }
  }
  CHECK(found);
  CHECK_THROWS(geometry(unit, 99));
}
