#include "hybridem/timedomain.hpp"

#include <stdexcept>

#include "hybridem/diagnostics.hpp"

namespace hybridem {

SourceSpec zero_sources() {
  SourceSpec s;
  s.current = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); };
  s.charge = [](const Eigen::Vector2d&, double) { return 0.0; };
  s.zero = true;
  return s;
}

double check_charge_compatibility(const Mesh& mesh, const SourceSpec& sources, int scalar_degree,
                                  int quad_degree) {
  if (!sources.charge_rate) return 0.0;
  // weak residual of rho_dot + div J against broken scalars:
  // int phi rho_dot + int_{dK} phi J.n - int grad phi . J per cell
  const Eigen::VectorXd rate = load_vector_broken_scalar(
      mesh, scalar_degree,
      [&](const Eigen::Vector2d& x) { return sources.charge_rate(x, 0.0); }, quad_degree);

  const ScalarModalBasis& sm = scalar_modal(scalar_degree);
  const TriangleRule rule = gauss_triangle(quad_degree);
  Eigen::Matrix2Xd pts(2, rule.size());
  for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
  Eigen::MatrixXd vals, gx, gy;
  sm.eval(pts, vals);
  sm.eval_grad(pts, gx, gy);

  const IntervalRule erule = gauss_interval(quad_degree);

  double worst = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    Eigen::VectorXd res = rate.segment(static_cast<long>(c) * sm.dim(), sm.dim());
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d j = sources.current(g.map(pts.col(q)), 0.0);
      const Eigen::Vector2d jref = g.jac_inv * j;  // (J^{-T} grad_hat phi) . j
      for (int i = 0; i < sm.dim(); ++i)
        res[i] -= rule.weights[q] * g.det * (gx(i, q) * jref.x() + gy(i, q) * jref.y());
    }
    for (int a = 0; a < 3; ++a) {
      auto [p, q] = ref_edge_endpoints(a);
      for (int e = 0; e < erule.size(); ++e) {
        const Eigen::Vector2d xhat = p + erule.points[e] * (q - p);
        Eigen::Matrix2Xd one(2, 1);
        one.col(0) = xhat;
        Eigen::MatrixXd phi;
        sm.eval(one, phi);
        const Eigen::Vector2d j = sources.current(g.map(xhat), 0.0);
        const double jn = j.dot(g.normal[a]) * g.edge_length[a];
        for (int i = 0; i < sm.dim(); ++i) res[i] += erule.weights[e] * phi(i, 0) * jn;
      }
    }
    worst = std::max(worst, res.cwiseAbs().maxCoeff());
  }
  return worst;
}

TimeDomainProblem setup_time_domain(const Mesh& mesh, int r, int mult_degree, double eps,
                                    double mu, KernelMode mode, double rank_tol) {
  if (r < 2 || r > 5) throw std::invalid_argument("setup_time_domain: r in 2..5");
  const int k = r - 1;
  TimeDomainProblem p;
  p.mesh = &mesh;
  p.sys = assemble(mesh, k, mult_degree, eps, mu);
  p.quad_degree = 2 * r + 4;

  if (mode == KernelMode::Conforming) {
    if (mult_degree < k + 2)
      throw std::invalid_argument(
          "setup_time_domain: conforming mode needs multiplier degree >= k+2");
    p.kernel = p.sys.conf.embedding;
    p.conforming_mode = true;
  } else {
    const Eigen::MatrixXd z = nullspace_basis(p.sys.B, rank_tol);
    p.kernel = z.sparseView();
    p.conforming_mode = false;
  }

  const Eigen::SparseMatrix<double> kt = p.kernel.transpose();
  p.reduced_mass_mat = kt * p.sys.M_plain * p.kernel;
  p.reduced_stiffness = kt * p.sys.A * p.kernel;
  p.reduced_mass.factor(p.reduced_mass_mat);
  p.recovery = std::make_unique<RecoverySolver>(mesh, p.sys, rank_tol);
  return p;
}

namespace {

// div rows: int_K psi (div w) for psi in broken P_{k'-1}, per div-space DOF.
Eigen::SparseMatrix<double> assemble_div_rows(const Mesh& mesh, const DivConformingMap& div) {
  const int kd = div.degree;
  const ScalarModalBasis& smd = scalar_modal(kd);
  const ScalarModalBasis& smt = scalar_modal(kd - 1);
  const int nsd = smd.dim();
  const int nst = smt.dim();
  const TriangleRule rule = gauss_triangle(2 * kd + 2);
  Eigen::Matrix2Xd pts(2, rule.size());
  for (int q = 0; q < rule.size(); ++q) pts.col(q) = rule.point(q);
  Eigen::MatrixXd tv, gx, gy;
  smt.eval(pts, tv);
  smd.eval_grad(pts, gx, gy);

  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = geometry(mesh, c);
    const Eigen::Matrix2d ji = g.jac_inv;
    // div(J^{-T} vhat) = tr(J^{-T} grad_hat vhat J^{-1}); container layout
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nst, 2 * nsd);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * g.det;
      for (int s = 0; s < nsd; ++s) {
        // div(J^{-T} vhat) for the x-block (phi_s, 0) and y-block (0, phi_s):
        // with grad u = J^{-T} G_hat J^{-1}, div = trace.
        const double a11 = ji(0, 0), a12 = ji(0, 1), a21 = ji(1, 0), a22 = ji(1, 1);
        const double gxs = gx(s, q), gys = gy(s, q);
        const double div_x = a11 * (gxs * a11 + gys * a21) + a12 * (gxs * a12 + gys * a22);
        const double div_y = a21 * (gxs * a11 + gys * a21) + a22 * (gxs * a12 + gys * a22);
        for (int i = 0; i < nst; ++i) {
          local(i, s) += w * tv(i, q) * div_x;
          local(i, nsd + s) += w * tv(i, q) * div_y;
        }
      }
    }
    for (int i = 0; i < nst; ++i)
      for (int j = 0; j < 2 * nsd; ++j)
        if (local(i, j) != 0.0)
          trip.emplace_back(static_cast<long>(c) * nst + i, static_cast<long>(c) * 2 * nsd + j,
                            local(i, j));
  }
  Eigen::SparseMatrix<double> rows(static_cast<long>(mesh.num_cells()) * nst,
                                   static_cast<long>(mesh.num_cells()) * 2 * nsd);
  rows.setFromTriplets(trip.begin(), trip.end());
  return rows * div.embedding;
}

}  // namespace

Eigen::VectorXd init_Dhat(const TimeDomainProblem& problem, const Eigen::VectorXd& d0_broken,
                          const ScalarField& rho0, double rank_tol) {
  const Mesh& mesh = *problem.mesh;
  const SystemMatrices& sys = problem.sys;
  const int quad = problem.quad_degree;

  // constraint block 1: boundary pairing rows equal the volume data
  const Eigen::VectorXd rhs1 = sys.G.transpose() * (sys.M_plain * d0_broken) +
                               load_vector_broken_scalar(mesh, sys.scalar_degree, rho0, quad);
  // constraint block 2: element-wise div Dhat = projection of rho0
  const Eigen::SparseMatrix<double> div_rows = assemble_div_rows(mesh, sys.div);
  const Eigen::VectorXd rhs2 =
      load_vector_broken_scalar(mesh, sys.div_degree - 1, rho0, quad);

  if (d0_broken.isZero(0.0) && rhs1.isZero(0.0) && rhs2.isZero(0.0))
    return Eigen::VectorXd::Zero(sys.div.dim);

  const long n1 = sys.beta.rows(), n2 = div_rows.rows();
  Eigen::MatrixXd c(n1 + n2, sys.div.dim);
  c.topRows(n1) = Eigen::MatrixXd(sys.beta);
  c.bottomRows(n2) = Eigen::MatrixXd(div_rows);
  Eigen::VectorXd g(n1 + n2);
  g.head(n1) = rhs1;
  g.tail(n2) = rhs2;

  const Eigen::MatrixXd qmat(sys.Mdiv);
  const Eigen::VectorXd q = sys.Mdiv_cross * d0_broken;
  ConstrainedLsqResult res;
  try {
    res = constrained_lsq(qmat, q, c, g, rank_tol);
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(std::string("init_Dhat: initial data incompatible (") + err.what() +
                             ")");
  }
  return res.x;
}

TimeState make_initial_state(const TimeDomainProblem&, const Eigen::VectorXd& a0_red,
                             const Eigen::VectorXd& d0_red, const Eigen::VectorXd& dhat0) {
  TimeState s;
  s.t = 0.0;
  s.n = 0;
  s.a_red = a0_red;
  s.d_red = d0_red;
  s.dhat = dhat0;
  return s;
}

void leapfrog_step(const TimeDomainProblem& problem, TimeState& state, double dt,
                   const SourceSpec& sources) {
  const Mesh& mesh = *problem.mesh;
  const SystemMatrices& sys = problem.sys;
  const double eps = sys.eps;
  const double t_half = state.t + 0.5 * dt;

  // (i) half kick
  const Eigen::VectorXd a_half = state.a_red - (0.5 * dt / eps) * state.d_red;
  const Eigen::VectorXd a_half_broken = problem.lift(a_half);

  // (ii) velocity of D on the kernel space
  Eigen::VectorXd jload;  // <J, v_i>
  Eigen::VectorXd jproj;  // broken projection of J
  const bool with_sources = !sources.zero;
  const Eigen::VectorXd stiff_term = sys.A * a_half_broken;
  Eigen::VectorXd rhs_red = problem.kernel.transpose() * stiff_term;
  if (with_sources) {
    jload = load_vector_broken(mesh, sys.k, sources.current_at(t_half), problem.quad_degree);
    jproj = project_broken_vector(mesh, sys.k, sources.current_at(t_half), problem.quad_degree);
    rhs_red -= problem.kernel.transpose() * jload;
  }
  const Eigen::VectorXd ddot_red = problem.reduced_mass.solve(rhs_red);
  const Eigen::VectorXd ddot_broken = problem.lift(ddot_red);

  // (iii) trace recovery at the half step and flux update
  Eigen::VectorXd g = sys.M_plain * ddot_broken - stiff_term;
  if (with_sources) g += jload;
  const Eigen::VectorXd h_half = (1.0 / sys.mu) * (sys.curl_map * a_half_broken);
  Eigen::VectorXd q = sys.W * h_half + sys.R * ddot_broken;
  if (with_sources) q += sys.R * jproj;
  state.hhat_half = problem.recovery->solve(q, g).hhat;

  const int quad = problem.quad_degree;
  CellwiseVectorField update = [&](int cell, const Eigen::Matrix2Xd& ref_pts) {
    const Eigen::Matrix2Xd grads =
        eval_multiplier_grad(mesh, sys.mult, state.hhat_half, cell, ref_pts);
    Eigen::Matrix2Xd out(2, ref_pts.cols());
    for (Eigen::Index i = 0; i < ref_pts.cols(); ++i)
      out.col(i) = Eigen::Vector2d(grads(1, i), -grads(0, i));  // curl of a scalar
    if (with_sources) {
      const CellGeometry gm = geometry(mesh, cell);
      for (Eigen::Index i = 0; i < ref_pts.cols(); ++i)
        out.col(i) -= sources.current(gm.map(ref_pts.col(i)), t_half);
    }
    return out;
  };
  state.dhat += dt * div_interpolate_cellwise(mesh, sys.div_degree, update, quad);

  // (ii continued, iv) drift and half kick
  state.d_red += dt * ddot_red;
  state.a_red = a_half - (0.5 * dt / eps) * state.d_red;
  state.t += dt;
  state.n += 1;
}

StepRecord diagnostics_record(const TimeDomainProblem& problem, const TimeState& state,
                              const SourceSpec& sources) {
  const Mesh& mesh = *problem.mesh;
  const SystemMatrices& sys = problem.sys;
  const int quad = problem.quad_degree;
  StepRecord rec;
  rec.step = state.n;
  rec.t = state.t;
  const Eigen::VectorXd d_broken = problem.lift(state.d_red);
  const Eigen::VectorXd dhat_broken = sys.div.embedding * state.dhat;
  rec.seminorm_D = hdiv_seminorm(mesh, sys.k, d_broken, quad);
  rec.seminorm_Dhat = hdiv_seminorm(mesh, sys.div_degree, dhat_broken, quad);
  const ScalarField rho = sources.charge_at(state.t);
  rec.flux_residual_max = flux_residual_max(mesh, sys, state.dhat, rho, quad);
  rec.constraint_residual = constraint_residual(mesh, sys, d_broken, state.dhat, rho, quad);
  rec.energy = 0.5 * ((1.0 / sys.eps) * state.d_red.dot(problem.reduced_mass_mat * state.d_red) +
                      state.a_red.dot(problem.reduced_stiffness * state.a_red));
  return rec;
}

TimeDomainResult run_leapfrog(const TimeDomainProblem& problem, TimeState state, double dt,
                              long steps, const SourceSpec& sources, bool record,
                              const std::function<void(const TimeState&)>& on_step) {
  TimeDomainResult result;
  if (record) result.records.push_back(diagnostics_record(problem, state, sources));
  for (long n = 0; n < steps; ++n) {
    leapfrog_step(problem, state, dt, sources);
    if (record) result.records.push_back(diagnostics_record(problem, state, sources));
    if (on_step) on_step(state);
  }
  result.state = std::move(state);
  return result;
}

}  // namespace hybridem
