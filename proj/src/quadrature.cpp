#include "hybridem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridem {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] via Newton iteration on P_n.
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

IntervalRule gauss_interval(int required_degree) {
  if (required_degree < 0 || required_degree > 64)
    throw std::invalid_argument("gauss_interval: unsupported degree");
  const int n = required_degree / 2 + 1;  // exactness 2n-1 >= degree
  Eigen::VectorXd x, w;
  gauss_legendre(n, x, w);
  IntervalRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  rule.exact_degree = 2 * n - 1;
  return rule;
}

TriangleRule gauss_triangle(int required_degree) {
  if (required_degree < 0 || required_degree > 20)
    throw std::invalid_argument("gauss_triangle: unsupported degree");
  const int d = required_degree;
  // Duffy map x = u, y = v (1-u): integrand degree d becomes d+1 in u
  // (the Jacobian contributes 1-u) and d in v.
  const int nu = (d + 1) / 2 + 1;
  const int nv = d / 2 + 1;
  Eigen::VectorXd xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(nv, xv, wv);

  TriangleRule rule;
  rule.bary.resize(nu * nv, 3);
  rule.weights.resize(nu * nv);
  int q = 0;
  for (int i = 0; i < nu; ++i) {
    const double u = 0.5 * (xu[i] + 1.0);
    for (int j = 0; j < nv; ++j) {
      const double v = 0.5 * (xv[j] + 1.0);
      const double x = u;
      const double y = v * (1.0 - u);
      rule.bary(q, 0) = 1.0 - x - y;
      rule.bary(q, 1) = x;
      rule.bary(q, 2) = y;
      rule.weights[q] = 0.25 * wu[i] * wv[j] * (1.0 - u);
      ++q;
    }
  }
  rule.exact_degree = d;
  return rule;
}

double monomial_integral(int a, int b) {
  // a! b! / (a+b+2)!
  double val = 1.0;
  for (int i = 1; i <= b; ++i) val *= static_cast<double>(i) / (a + i);
  for (int i = a + b + 1; i <= a + b + 2; ++i) val /= i;
  return val;
}

}  // namespace hybridem
