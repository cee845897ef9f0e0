#include "hybridem/assembly.hpp"

#include <Eigen/SparseCholesky>

#include <stdexcept>
#include <vector>

namespace hybridem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::Matrix2Xd rule_points(const TriangleRule& rule) {
  Eigen::Matrix2Xd pts(2, rule.size());
  for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
  return pts;
}

// Reference Gram int phi_i psi_j between two scalar modal bases.
Eigen::MatrixXd scalar_gram(const ScalarModalBasis& a, const ScalarModalBasis& b) {
  const TriangleRule rule = gauss_triangle(a.degree() + b.degree() + 2);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  Eigen::MatrixXd va, vb;
  a.eval(pts, va);
  b.eval(pts, vb);
  return va * rule.weights.asDiagonal() * vb.transpose();
}

void scatter_block(Triplets& trip, long row0, long col0, const Eigen::MatrixXd& block) {
  for (long i = 0; i < block.rows(); ++i)
    for (long j = 0; j < block.cols(); ++j)
      if (block(i, j) != 0.0) trip.emplace_back(row0 + i, col0 + j, block(i, j));
}

// Per-cell broken vector mass with metric weight: det * [S00 G, S01 G; S01 G, S11 G].
Eigen::MatrixXd metric_mass(const Eigen::MatrixXd& gram, const CellGeometry& g) {
  const Eigen::Matrix2d s = g.jac_inv * g.jac_inv.transpose();
  const long ns = gram.rows();
  Eigen::MatrixXd block(2 * ns, 2 * ns);
  block.topLeftCorner(ns, ns) = (g.det * s(0, 0)) * gram;
  block.topRightCorner(ns, ns) = (g.det * s(0, 1)) * gram;
  block.bottomLeftCorner(ns, ns) = (g.det * s(1, 0)) * gram;
  block.bottomRightCorner(ns, ns) = (g.det * s(1, 1)) * gram;
  return block;
}

}  // namespace

SystemMatrices assemble(const Mesh& mesh, int k, int mult_degree, double eps, double mu) {
  if (!(eps > 0.0) || !(mu > 0.0)) throw std::invalid_argument("assemble: eps, mu must be positive");
  if (k < 1) throw std::invalid_argument("assemble: broken vector degree must be >= 1");
  if (mult_degree < 1) throw std::invalid_argument("assemble: multiplier degree must be >= 1");

  SystemMatrices sys;
  sys.k = k;
  sys.mult_degree = mult_degree;
  sys.div_degree = mult_degree - 1;
  sys.scalar_degree = k + 1;
  sys.eps = eps;
  sys.mu = mu;

  const int t = mesh.num_cells();
  const ScalarModalBasis& smk = scalar_modal(k);
  const int ns = smk.dim();
  const int nloc = 2 * ns;
  const LagrangeBasis& lag = lagrange_basis(mult_degree);
  const int nl = lag.dim();

  sys.mult = multiplier_map(mesh, mult_degree);
  sys.conf = conforming_edge_map(mesh, k);
  sys.div = div_conforming_map(mesh, sys.div_degree);
  sys.G = grad_embedding(mesh, sys.scalar_degree);
  sys.curl_map = curl_matrix(mesh, k);

  // --- reference-level pieces -------------------------------------------
  const Eigen::MatrixXd gram_k = scalar_gram(smk, smk);
  const TriangleRule vol_rule = gauss_triangle(2 * std::max(k, mult_degree) + 2);
  const Eigen::Matrix2Xd vol_pts = rule_points(vol_rule);

  Eigen::MatrixXd modal_vals, lag_vals, lag_gx, lag_gy;
  smk.eval(vol_pts, modal_vals);
  lag.eval(vol_pts, lag_vals);
  lag.eval_grad(vol_pts, lag_gx, lag_gy);

  const Eigen::MatrixXd wdiag = vol_rule.weights.asDiagonal();
  const Eigen::MatrixXd lag_gram = lag_vals * wdiag * lag_vals.transpose();
  const Eigen::MatrixXd kxx = lag_gx * wdiag * lag_gx.transpose();
  const Eigen::MatrixXd kxy = lag_gx * wdiag * lag_gy.transpose();
  const Eigen::MatrixXd kyy = lag_gy * wdiag * lag_gy.transpose();

  // curl-curl reference Gram of the stacked vector modal basis
  Eigen::MatrixXd smk_gx, smk_gy;
  smk.eval_grad(vol_pts, smk_gx, smk_gy);
  Eigen::MatrixXd curl_samples(nloc, vol_rule.size());
  curl_samples.topRows(ns) = -smk_gy;
  curl_samples.bottomRows(ns) = smk_gx;
  const Eigen::MatrixXd curl_gram = curl_samples * wdiag * curl_samples.transpose();

  // R local block is geometry independent: R(nu, i) = int (gy_nu phi_i, -gx_nu phi_i)
  Eigen::MatrixXd r_local(nl, nloc);
  r_local.leftCols(ns) = lag_gy * wdiag * modal_vals.transpose();
  r_local.rightCols(ns) = -(lag_gx * wdiag * modal_vals.transpose());

  // W local (multiplier x broken scalar degree k-1) scales with det
  const ScalarModalBasis& smh = scalar_modal(k - 1);
  Eigen::MatrixXd smh_vals;
  smh.eval(vol_pts, smh_vals);
  const Eigen::MatrixXd w_local = lag_vals * wdiag * smh_vals.transpose();

  // --- edge-level pieces for B ------------------------------------------
  const IntervalRule edge_rule = gauss_interval(k + mult_degree + 2);
  const int neq = edge_rule.size();
  std::array<Eigen::MatrixXd, 3> edge_modal, edge_lag;
  std::array<Eigen::Vector2d, 3> edge_dir;
  for (int a = 0; a < 3; ++a) {
    auto [p, q] = ref_edge_endpoints(a);
    edge_dir[a] = q - p;
    Eigen::Matrix2Xd pts(2, neq);
    for (int i = 0; i < neq; ++i) pts.col(i) = p + edge_rule.points[i] * (q - p);
    smk.eval(pts, edge_modal[a]);
    lag.eval(pts, edge_lag[a]);
  }

  // --- assembly loop ------------------------------------------------------
  Triplets m_trip, a_trip, b_trip, mhat_trip, khat_trip, r_trip, w_trip;
  for (int c = 0; c < t; ++c) {
    const CellGeometry g = geometry(mesh, c);
    const Eigen::Matrix2d s = g.jac_inv * g.jac_inv.transpose();
    const long row0 = static_cast<long>(c) * nloc;

    scatter_block(m_trip, row0, row0, metric_mass(gram_k, g));
    scatter_block(a_trip, row0, row0, (1.0 / (mu * g.det)) * curl_gram);

    // multiplier-space blocks
    const auto& dofs = sys.mult.cell_dofs[c];
    const Eigen::MatrixXd mh = g.det * lag_gram;
    const Eigen::MatrixXd kh =
        g.det * (s(0, 0) * kxx + s(0, 1) * (kxy + kxy.transpose()) + s(1, 1) * kyy);
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) {
        mhat_trip.emplace_back(dofs[i], dofs[j], mh(i, j));
        khat_trip.emplace_back(dofs[i], dofs[j], kh(i, j));
      }
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nloc; ++j) {
        if (r_local(i, j) != 0.0) r_trip.emplace_back(dofs[i], row0 + j, r_local(i, j));
      }
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < smh.dim(); ++j)
        w_trip.emplace_back(dofs[i], static_cast<long>(c) * smh.dim() + j,
                            g.det * w_local(i, j));

    // coupling: B(i, nu) -= int_0^1 h_nu (vhat_i . d) dtau per edge
    for (int a = 0; a < 3; ++a) {
      const Eigen::Vector2d d = edge_dir[a];
      for (int i = 0; i < nloc; ++i) {
        const int sidx = i % ns;
        const double comp = (i < ns) ? d.x() : d.y();
        if (comp == 0.0) continue;
        for (int j = 0; j < nl; ++j) {
          double val = 0.0;
          for (int q = 0; q < neq; ++q)
            val += edge_rule.weights[q] * edge_lag[a](j, q) * edge_modal[a](sidx, q);
          if (val != 0.0) b_trip.emplace_back(row0 + i, dofs[j], -comp * val);
        }
      }
    }
  }

  const long nb = static_cast<long>(t) * nloc;
  const long nm = sys.mult.dim;
  sys.M_plain.resize(nb, nb);
  sys.M_plain.setFromTriplets(m_trip.begin(), m_trip.end());
  sys.M = eps * sys.M_plain;
  sys.A.resize(nb, nb);
  sys.A.setFromTriplets(a_trip.begin(), a_trip.end());
  sys.B.resize(nb, nm);
  sys.B.setFromTriplets(b_trip.begin(), b_trip.end());
  sys.Mhat.resize(nm, nm);
  sys.Mhat.setFromTriplets(mhat_trip.begin(), mhat_trip.end());
  sys.Khat.resize(nm, nm);
  sys.Khat.setFromTriplets(khat_trip.begin(), khat_trip.end());
  sys.R.resize(nm, nb);
  sys.R.setFromTriplets(r_trip.begin(), r_trip.end());
  sys.W.resize(nm, static_cast<long>(t) * smh.dim());
  sys.W.setFromTriplets(w_trip.begin(), w_trip.end());

  sys.beta = assemble_constraint_form(mesh, sys.scalar_degree, sys.div);

  // div-space mass and cross mass against the broken P_k container
  {
    const ScalarModalBasis& smd = scalar_modal(sys.div_degree);
    const Eigen::MatrixXd gram_d = scalar_gram(smd, smd);
    const Eigen::MatrixXd gram_dk = scalar_gram(smd, smk);
    const int nsd = smd.dim();
    Triplets md_trip, mx_trip;
    for (int c = 0; c < t; ++c) {
      const CellGeometry g = geometry(mesh, c);
      const Eigen::Matrix2d s = g.jac_inv * g.jac_inv.transpose();
      scatter_block(md_trip, static_cast<long>(c) * 2 * nsd, static_cast<long>(c) * 2 * nsd,
                    metric_mass(gram_d, g));
      Eigen::MatrixXd cross(2 * nsd, nloc);
      cross.topLeftCorner(nsd, ns) = (g.det * s(0, 0)) * gram_dk;
      cross.topRightCorner(nsd, ns) = (g.det * s(0, 1)) * gram_dk;
      cross.bottomLeftCorner(nsd, ns) = (g.det * s(1, 0)) * gram_dk;
      cross.bottomRightCorner(nsd, ns) = (g.det * s(1, 1)) * gram_dk;
      scatter_block(mx_trip, static_cast<long>(c) * 2 * nsd, static_cast<long>(c) * nloc, cross);
    }
    Eigen::SparseMatrix<double> md(static_cast<long>(t) * 2 * nsd, static_cast<long>(t) * 2 * nsd);
    md.setFromTriplets(md_trip.begin(), md_trip.end());
    Eigen::SparseMatrix<double> mx(static_cast<long>(t) * 2 * nsd, nb);
    mx.setFromTriplets(mx_trip.begin(), mx_trip.end());
    const Eigen::SparseMatrix<double> pdt = sys.div.embedding.transpose();
    sys.Mdiv = pdt * md * sys.div.embedding;
    sys.Mdiv_cross = pdt * mx;
  }

  return sys;
}

Eigen::SparseMatrix<double> assemble_constraint_form(const Mesh& mesh, int scalar_degree,
                                                     const DivConformingMap& div) {
  const ScalarModalBasis& sm = scalar_modal(scalar_degree);
  const ScalarModalBasis& smd = scalar_modal(div.degree);
  const int nss = sm.dim();
  const int nsd = smd.dim();
  const int nloc = 2 * nsd;

  const IntervalRule rule = gauss_interval(scalar_degree + div.degree + 2);
  const int nq = rule.size();
  std::array<Eigen::MatrixXd, 3> edge_scalar, edge_vec;
  for (int a = 0; a < 3; ++a) {
    auto [p, q] = ref_edge_endpoints(a);
    Eigen::Matrix2Xd pts(2, nq);
    for (int i = 0; i < nq; ++i) pts.col(i) = p + rule.points[i] * (q - p);
    sm.eval(pts, edge_scalar[a]);
    smd.eval(pts, edge_vec[a]);
  }

  Triplets trip;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nss, nloc);
    for (int a = 0; a < 3; ++a) {
      const Eigen::Vector2d n = g.normal[a];
      const double len = g.edge_length[a];
      // u . n at edge points for each container function: u = J^{-T} vhat
      const Eigen::Vector2d jn = g.jac_inv * n;  // (J^{-T} vhat) . n = vhat . (J^{-1} n)
      for (int q = 0; q < nq; ++q) {
        const double w = rule.weights[q] * len;
        for (int i = 0; i < nss; ++i) {
          const double phi = edge_scalar[a](i, q);
          if (phi == 0.0) continue;
          for (int s = 0; s < nsd; ++s) {
            const double v = edge_vec[a](s, q);
            local(i, s) += w * phi * v * jn.x();
            local(i, nsd + s) += w * phi * v * jn.y();
          }
        }
      }
    }
    scatter_block(trip, static_cast<long>(c) * nss, static_cast<long>(c) * nloc, local);
  }
  Eigen::SparseMatrix<double> surf(static_cast<long>(mesh.num_cells()) * nss,
                                   static_cast<long>(mesh.num_cells()) * nloc);
  surf.setFromTriplets(trip.begin(), trip.end());
  return surf * div.embedding;
}

void assemble_conforming_direct(const Mesh& mesh, const ConformingEdgeMap& conf, double eps,
                                double mu, Eigen::SparseMatrix<double>& mass,
                                Eigen::SparseMatrix<double>& stiffness) {
  const int k = conf.degree;
  const EdgeElement& el = edge_element(k);
  const ScalarModalBasis& sm = scalar_modal(k);
  const int ns = sm.dim();
  const int nloc = 2 * ns;
  const int per_edge = k + 1;
  const int n_int = el.n_interior();
  const long edge_dofs =
      static_cast<long>(mesh.num_interior_edges()) * per_edge;

  const Eigen::MatrixXd gram = scalar_gram(sm, sm);
  const TriangleRule rule = gauss_triangle(2 * k + 2);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  Eigen::MatrixXd gx, gy;
  sm.eval_grad(pts, gx, gy);
  Eigen::MatrixXd curl_samples(nloc, rule.size());
  curl_samples.topRows(ns) = -gy;
  curl_samples.bottomRows(ns) = gx;
  const Eigen::MatrixXd curl_gram =
      curl_samples * rule.weights.asDiagonal() * curl_samples.transpose();

  Triplets m_trip, a_trip;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);

    // local conforming basis present on this cell, in container coords
    std::vector<long> cols;
    Eigen::MatrixXd x(nloc, 3 * per_edge + n_int);
    int nfun = 0;
    for (int a = 0; a < 3; ++a) {
      const int e = mesh.cell_edges[c][a];
      if (conf.interior_edge_index[e] < 0) continue;
      for (int j = 0; j < per_edge; ++j) {
        const double sgn = (mesh.cell_edge_sign[c][a] == 1) ? 1.0 : ((j % 2 == 0) ? -1.0 : 1.0);
        x.col(nfun) = sgn * el.dual_in_modal().col(a * per_edge + j);
        cols.push_back(static_cast<long>(conf.interior_edge_index[e]) * per_edge + j);
        ++nfun;
      }
    }
    for (int i = 0; i < n_int; ++i) {
      x.col(nfun) = el.dual_in_modal().col(3 * per_edge + i);
      cols.push_back(edge_dofs + static_cast<long>(c) * n_int + i);
      ++nfun;
    }

    const Eigen::MatrixXd xs = x.leftCols(nfun);
    const Eigen::MatrixXd ml = eps * (xs.transpose() * metric_mass(gram, g) * xs);
    const Eigen::MatrixXd al = (1.0 / (mu * g.det)) * (xs.transpose() * curl_gram * xs);
    for (int i = 0; i < nfun; ++i)
      for (int j = 0; j < nfun; ++j) {
        m_trip.emplace_back(cols[i], cols[j], ml(i, j));
        a_trip.emplace_back(cols[i], cols[j], al(i, j));
      }
  }
  mass.resize(conf.dim, conf.dim);
  mass.setFromTriplets(m_trip.begin(), m_trip.end());
  stiffness.resize(conf.dim, conf.dim);
  stiffness.setFromTriplets(a_trip.begin(), a_trip.end());
}

Eigen::VectorXd load_vector_broken(const Mesh& mesh, int k, const VectorField& f,
                                   int quad_degree) {
  const ScalarModalBasis& sm = scalar_modal(k);
  const int ns = sm.dim();
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  Eigen::MatrixXd vals;
  sm.eval(pts, vals);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(mesh.num_cells()) * 2 * ns);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const long row0 = static_cast<long>(c) * 2 * ns;
    for (int q = 0; q < rule.size(); ++q) {
      // <f, J^{-T} vhat> = (J^{-1} f) . vhat
      const Eigen::Vector2d fv = g.jac_inv * f(g.map(pts.col(q)));
      const double w = rule.weights[q] * g.det;
      for (int s = 0; s < ns; ++s) {
        out[row0 + s] += w * fv.x() * vals(s, q);
        out[row0 + ns + s] += w * fv.y() * vals(s, q);
      }
    }
  }
  return out;
}

Eigen::VectorXd load_vector_broken_scalar(const Mesh& mesh, int m, const ScalarField& f,
                                          int quad_degree) {
  const ScalarModalBasis& sm = scalar_modal(m);
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  Eigen::MatrixXd vals;
  sm.eval(pts, vals);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(mesh.num_cells()) * sm.dim());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const long row0 = static_cast<long>(c) * sm.dim();
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * g.det * f(g.map(pts.col(q)));
      for (int s = 0; s < sm.dim(); ++s) out[row0 + s] += w * vals(s, q);
    }
  }
  return out;
}

Eigen::VectorXd project_broken_vector(const Mesh& mesh, int k, const VectorField& f,
                                      int quad_degree) {
  const ScalarModalBasis& sm = scalar_modal(k);
  const int ns = sm.dim();
  const Eigen::MatrixXd gram = scalar_gram(sm, sm);
  const Eigen::VectorXd load = load_vector_broken(mesh, k, f, quad_degree);
  Eigen::VectorXd out(load.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const Eigen::MatrixXd mk = metric_mass(gram, g);
    out.segment(static_cast<long>(c) * 2 * ns, 2 * ns) =
        mk.ldlt().solve(load.segment(static_cast<long>(c) * 2 * ns, 2 * ns));
  }
  return out;
}

Eigen::VectorXd project_broken_scalar(const Mesh& mesh, int m, const ScalarField& f,
                                      int quad_degree) {
  const ScalarModalBasis& sm = scalar_modal(m);
  const Eigen::MatrixXd gram = scalar_gram(sm, sm);
  const Eigen::VectorXd load = load_vector_broken_scalar(mesh, m, f, quad_degree);
  const Eigen::LDLT<Eigen::MatrixXd> fac(gram);
  Eigen::VectorXd out(load.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double det = geometry(mesh, c).det;
    out.segment(static_cast<long>(c) * sm.dim(), sm.dim()) =
        fac.solve(load.segment(static_cast<long>(c) * sm.dim(), sm.dim())) / det;
  }
  return out;
}

Eigen::VectorXd project_multiplier(const Mesh& mesh, const MultiplierMap& map,
                                   const Eigen::SparseMatrix<double>& mhat, const ScalarField& f,
                                   int quad_degree) {
  const LagrangeBasis& lag = lagrange_basis(map.degree);
  const TriangleRule rule = gauss_triangle(quad_degree);
  const Eigen::Matrix2Xd pts = rule_points(rule);
  Eigen::MatrixXd vals;
  lag.eval(pts, vals);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(map.dim);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * g.det * f(g.map(pts.col(q)));
      for (int i = 0; i < lag.dim(); ++i) load[map.cell_dofs[c][i]] += w * vals(i, q);
    }
  }
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(mhat);
  if (llt.info() != Eigen::Success) throw std::runtime_error("project_multiplier: mass not SPD");
  return llt.solve(load);
}

FieldCoefficients project_field(const Mesh& mesh, const SpaceHandle& space, const VectorField& vf,
                                const ScalarField& sf, int quad_degree) {
  FieldCoefficients out;
  out.space = space;
  switch (space.kind) {
    case SpaceKind::BrokenVector:
      out.values = project_broken_vector(mesh, space.degree, vf, quad_degree);
      break;
    case SpaceKind::BrokenScalar:
      out.values = project_broken_scalar(mesh, space.degree, sf, quad_degree);
      break;
    default:
      throw std::invalid_argument("project_field: unsupported target space");
  }
  return out;
}

}  // namespace hybridem
