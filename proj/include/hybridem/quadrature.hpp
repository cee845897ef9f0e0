#pragma once

#include <Eigen/Dense>

namespace hybridem {

/// Quadrature rule on the reference triangle {x,y >= 0, x+y <= 1}.
/// Points are barycentric triples (1-x-y, x, y); weights are positive and
/// sum to the reference area 1/2.
struct TriangleRule {
  Eigen::MatrixX3d bary;
  Eigen::VectorXd weights;
  int exact_degree = 0;

  int size() const { return static_cast<int>(weights.size()); }
  Eigen::Vector2d point(int q) const { return {bary(q, 1), bary(q, 2)}; }
};

/// Gauss-Legendre rule on [0,1]; weights sum to 1.
struct IntervalRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
  int exact_degree = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Rule integrating all polynomials of total degree <= required_degree
/// exactly, built from a Duffy-collapsed Gauss-Legendre tensor grid.
/// Supported up to degree 20.
TriangleRule gauss_triangle(int required_degree);

IntervalRule gauss_interval(int required_degree);

/// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double monomial_integral(int a, int b);

}  // namespace hybridem
