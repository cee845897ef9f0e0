#include "hybridem/reference.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace hybridem {

double shifted_legendre(int j, double t) {
  const double x = 2.0 * t - 1.0;
  double p0 = 1.0;
  if (j == 0) return p0;
  double p1 = x;
  for (int k = 2; k <= j; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

ScalarModalBasis::ScalarModalBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > 8) throw std::invalid_argument("ScalarModalBasis: degree out of range");
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) monos_.emplace_back(a, d - a);
  const int n = dim();

  // Monomial Gram from exact integrals, then Gram-Schmidt (two passes).
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gram(i, j) = monomial_integral(monos_[i].first + monos_[j].first,
                                     monos_[i].second + monos_[j].second);

  coeff_ = Eigen::MatrixXd::Identity(n, n);
  auto dot = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return u.dot(gram * v);
  };
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = coeff_.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < i; ++j) {
        const Eigen::VectorXd pj = coeff_.row(j).transpose();
        v -= dot(pj, v) * pj;
      }
    v /= std::sqrt(dot(v, v));
    coeff_.row(i) = v.transpose();
  }
  // Cholesky correction: the GS result has Gram = I + O(cond * eps);
  // one triangular re-normalization pushes it to machine precision.
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::MatrixXd g = coeff_ * gram * coeff_.transpose();
    const Eigen::LLT<Eigen::MatrixXd> llt(g);
    coeff_ = llt.matrixL().solve(coeff_);
  }
}

void ScalarModalBasis::eval(const Eigen::Matrix2Xd& pts, Eigen::MatrixXd& vals) const {
  const int n = dim();
  const int np = static_cast<int>(pts.cols());
  Eigen::MatrixXd mono(n, np);
  for (int q = 0; q < np; ++q) {
    const double x = pts(0, q), y = pts(1, q);
    for (int m = 0; m < n; ++m)
      mono(m, q) = std::pow(x, monos_[m].first) * std::pow(y, monos_[m].second);
  }
  vals = coeff_ * mono;
}

void ScalarModalBasis::eval_grad(const Eigen::Matrix2Xd& pts, Eigen::MatrixXd& gx,
                                 Eigen::MatrixXd& gy) const {
  const int n = dim();
  const int np = static_cast<int>(pts.cols());
  Eigen::MatrixXd mx(n, np), my(n, np);
  for (int q = 0; q < np; ++q) {
    const double x = pts(0, q), y = pts(1, q);
    for (int m = 0; m < n; ++m) {
      const int a = monos_[m].first, b = monos_[m].second;
      mx(m, q) = (a == 0) ? 0.0 : a * std::pow(x, a - 1) * std::pow(y, b);
      my(m, q) = (b == 0) ? 0.0 : b * std::pow(x, a) * std::pow(y, b - 1);
    }
  }
  gx = coeff_ * mx;
  gy = coeff_ * my;
}

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree), modal_(degree) {
  if (degree < 0 || degree > 8) throw std::invalid_argument("LagrangeBasis: degree out of range");
  std::vector<Eigen::Vector2d> pts;
  if (degree == 0) {
    pts.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    node_info_.push_back({NodeInfo::Interior, 0, 0});
  } else {
    const Eigen::Vector2d v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (int i = 0; i < 3; ++i) {
      pts.push_back(v[i]);
      node_info_.push_back({NodeInfo::Vertex, i, 0});
    }
    const int m = degree;
    for (int a = 0; a < 3; ++a) {
      const Eigen::Vector2d p = v[(a + 1) % 3], q = v[(a + 2) % 3];
      for (int i = 1; i <= m - 1; ++i) {
        pts.push_back(p + (static_cast<double>(i) / m) * (q - p));
        node_info_.push_back({NodeInfo::Edge, a, i - 1});
      }
    }
    int cnt = 0;
    for (int a = 1; a <= m - 1; ++a)
      for (int b = 1; a + b <= m - 1; ++b) {
        pts.emplace_back(static_cast<double>(a) / m, static_cast<double>(b) / m);
        node_info_.push_back({NodeInfo::Interior, 0, cnt++});
      }
  }
  nodes_.resize(2, static_cast<Eigen::Index>(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) nodes_.col(static_cast<Eigen::Index>(i)) = pts[i];

  // Nodal basis expressed in the (well-conditioned) modal basis.
  Eigen::MatrixXd vand;
  modal_.eval(nodes_, vand);  // vand(j, i) = phi_j(node_i)
  coeff_in_modal_ = vand.fullPivLu().inverse();
}

void LagrangeBasis::eval(const Eigen::Matrix2Xd& pts, Eigen::MatrixXd& vals) const {
  Eigen::MatrixXd m;
  modal_.eval(pts, m);
  vals = coeff_in_modal_ * m;
}

void LagrangeBasis::eval_grad(const Eigen::Matrix2Xd& pts, Eigen::MatrixXd& gx,
                              Eigen::MatrixXd& gy) const {
  Eigen::MatrixXd mx, my;
  modal_.eval_grad(pts, mx, my);
  gx = coeff_in_modal_ * mx;
  gy = coeff_in_modal_ * my;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> ref_edge_endpoints(int a) {
  const Eigen::Vector2d v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  switch (a) {
    case 0: return {v[1], v[2]};
    case 1: return {v[2], v[0]};
    case 2: return {v[0], v[1]};
    default: throw std::out_of_range("ref_edge_endpoints");
  }
}

EdgeElement::EdgeElement(int degree) : degree_(degree) {
  if (degree < 1 || degree > 6) throw std::invalid_argument("EdgeElement: degree out of range");
  const ScalarModalBasis& sm = scalar_modal(degree);
  ns_ = sm.dim();
  const int n = dim();
  const int k = degree;

  // Edge tangential moments of the stacked vector modal basis.
  edge_rows_.setZero(3 * (k + 1), n);
  const IntervalRule rule = gauss_interval(2 * k + 1);
  for (int a = 0; a < 3; ++a) {
    auto [p, q] = ref_edge_endpoints(a);
    const Eigen::Vector2d d = q - p;
    Eigen::Matrix2Xd pts(2, rule.size());
    for (int i = 0; i < rule.size(); ++i) pts.col(i) = p + rule.points[i] * d;
    Eigen::MatrixXd vals;
    sm.eval(pts, vals);
    for (int j = 0; j <= k; ++j) {
      for (int i = 0; i < rule.size(); ++i) {
        const double w = rule.weights[i] * shifted_legendre(j, rule.points[i]);
        for (int s = 0; s < ns_; ++s) {
          edge_rows_(a * (k + 1) + j, s) += w * vals(s, i) * d.x();
          edge_rows_(a * (k + 1) + j, ns_ + s) += w * vals(s, i) * d.y();
        }
      }
    }
  }

  // Interior bubble space: kernel of the edge-moment map (tangential trace
  // vanishes on the whole boundary), orthonormalized.
  const int n_int = n - 3 * (k + 1);
  if (n_int > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(edge_rows_, Eigen::ComputeFullV);
    if (svd.rank() != 3 * (k + 1))
      throw std::runtime_error("EdgeElement: edge moment rows are rank deficient");
    bubble_ = svd.matrixV().rightCols(n_int);
  } else {
    bubble_.resize(n, 0);
  }

  dof_matrix_.resize(n, n);
  dof_matrix_.topRows(3 * (k + 1)) = edge_rows_;
  if (n_int > 0) {
    // Interior moments in the L2(ref) inner product; the modal basis is
    // orthonormal, so the pairing is just bubble^T.
    dof_matrix_.bottomRows(n_int) = bubble_.transpose();
  }
  dual_in_modal_ = dof_matrix_.fullPivLu().inverse();
}

namespace {

template <typename T>
const T& cached(int degree) {
  static std::map<int, std::unique_ptr<T>> cache;
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, std::make_unique<T>(degree)).first;
  return *it->second;
}

// Expand polynomial data sampled at quadrature points in a modal basis:
// coeffs = Gram^{-1} (int f phi_i), exact when f is in the span.
Eigen::MatrixXd expand_in_modal(const ScalarModalBasis& basis, const TriangleRule& rule,
                                const Eigen::MatrixXd& samples) {
  Eigen::MatrixXd vals;
  Eigen::Matrix2Xd pts(2, rule.size());
  for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
  basis.eval(pts, vals);
  const Eigen::MatrixXd wv = vals * rule.weights.asDiagonal();
  const Eigen::MatrixXd gram = wv * vals.transpose();
  const Eigen::MatrixXd rhs = wv * samples.transpose();
  return gram.ldlt().solve(rhs);  // dim x nfields
}

}  // namespace

const ScalarModalBasis& scalar_modal(int degree) { return cached<ScalarModalBasis>(degree); }
const LagrangeBasis& lagrange_basis(int degree) { return cached<LagrangeBasis>(degree); }
const EdgeElement& edge_element(int degree) { return cached<EdgeElement>(degree); }

Eigen::MatrixXd grad_coefficients(int m) {
  if (m < 1) throw std::invalid_argument("grad_coefficients: degree must be >= 1");
  const ScalarModalBasis& src = scalar_modal(m);
  const ScalarModalBasis& dst = scalar_modal(m - 1);
  const TriangleRule rule = gauss_triangle(2 * m);
  Eigen::Matrix2Xd pts(2, rule.size());
  for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
  Eigen::MatrixXd gx, gy;
  src.eval_grad(pts, gx, gy);
  const Eigen::MatrixXd cx = expand_in_modal(dst, rule, gx);  // dst_dim x src_dim
  const Eigen::MatrixXd cy = expand_in_modal(dst, rule, gy);
  Eigen::MatrixXd out(2 * dst.dim(), src.dim());
  out.topRows(dst.dim()) = cx;
  out.bottomRows(dst.dim()) = cy;
  return out;
}

Eigen::MatrixXd curl_coefficients(int k) {
  if (k < 1) throw std::invalid_argument("curl_coefficients: degree must be >= 1");
  const ScalarModalBasis& vec = scalar_modal(k);
  const ScalarModalBasis& dst = scalar_modal(k - 1);
  const int ns = vec.dim();
  const TriangleRule rule = gauss_triangle(2 * k);
  Eigen::Matrix2Xd pts(2, rule.size());
  for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
  Eigen::MatrixXd gx, gy;
  vec.eval_grad(pts, gx, gy);
  // curl(v) = dx v_y - dy v_x for v in the stacked layout
  Eigen::MatrixXd samples(2 * ns, rule.size());
  samples.topRows(ns) = -gy;
  samples.bottomRows(ns) = gx;
  return expand_in_modal(dst, rule, samples);  // dst_dim x 2 ns
}

BasisInfo make_basis(BasisFamily family, int degree) {
  BasisInfo info{family, degree, 0, 0, 0};
  switch (family) {
    case BasisFamily::ScalarLagrange: {
      if (degree < 0 || degree > 6) throw std::invalid_argument("make_basis: Lagrange degree 0..6");
      info.dim = lagrange_basis(degree).dim();
      break;
    }
    case BasisFamily::VectorP: {
      if (degree < 1 || degree > 4) throw std::invalid_argument("make_basis: vector-P degree 1..4");
      info.dim = 2 * scalar_modal(degree).dim();
      break;
    }
    case BasisFamily::EdgeBdm: {
      if (degree < 1 || degree > 4) throw std::invalid_argument("make_basis: edge-BDM degree 1..4");
      const EdgeElement& el = edge_element(degree);
      info.dim = el.dim();
      info.dofs_per_edge = el.edge_dofs();
      info.interior_dofs = el.n_interior();
      break;
    }
  }
  return info;
}

}  // namespace hybridem
