// Python bindings for the main operations: mesh queries, the leapfrog
// time-domain driver, the eigenmode pipeline, and convergence studies.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "hybridem/frequencydomain.hpp"
#include "hybridem/selfcheck.hpp"
#include "hybridem/timedomain.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace hybridem;

namespace {

const Rect kDomain{0.0, 0.0, M_PI, M_PI};

py::dict mesh_info(int n) {
  const Mesh mesh = generate_uniform_grid(n, kDomain);
  py::dict d;
  d["cells"] = mesh.num_cells();
  d["vertices"] = mesh.num_vertices();
  d["edges"] = mesh.num_edges();
  d["boundary_edges"] = mesh.num_boundary_edges();
  d["interior_edges"] = mesh.num_interior_edges();
  d["h"] = mesh.h;
  return d;
}

py::dict time_domain(int n, int r, double dt, long steps, int mult_degree) {
  if (mult_degree < 0) mult_degree = r + 1;
  const Mesh mesh = generate_uniform_grid(n, kDomain);
  const KernelMode mode =
      (mult_degree >= r + 1) ? KernelMode::Conforming : KernelMode::NullspaceBasis;
  const TimeDomainProblem problem = setup_time_domain(mesh, r, mult_degree, 1.0, 1.0, mode);
  const Eigen::VectorXd a0_broken = project_broken_vector(
      mesh, r - 1,
      [](const Eigen::Vector2d& x) {
        return Eigen::Vector2d(x.y() * (M_PI - x.y()), x.x() * (M_PI - x.x()));
      },
      2 * r + 4);
  TimeState state = make_initial_state(problem, embedded_coefficients(problem.kernel, a0_broken),
                                       Eigen::VectorXd::Zero(problem.reduced_dim()),
                                       Eigen::VectorXd::Zero(problem.sys.div.dim));
  const TimeDomainResult res = run_leapfrog(problem, std::move(state), dt, steps, zero_sources());

  std::vector<double> t, sd, sdh, flux, cons, energy;
  for (const auto& rec : res.records) {
    t.push_back(rec.t);
    sd.push_back(rec.seminorm_D);
    sdh.push_back(rec.seminorm_Dhat);
    flux.push_back(rec.flux_residual_max);
    cons.push_back(rec.constraint_residual);
    energy.push_back(rec.energy);
  }
  py::dict d;
  d["t"] = t;
  d["seminorm_D"] = sd;
  d["seminorm_Dhat"] = sdh;
  d["flux_residual_max"] = flux;
  d["constraint_residual"] = cons;
  d["energy"] = energy;
  d["nonconforming"] = (mult_degree < r + 1);
  return d;
}

py::dict eigenmode(int n, int r, double sigma, double tol) {
  const Mesh mesh = generate_uniform_grid(n, kDomain);
  const SystemMatrices sys = assemble(mesh, r - 1, r + 1, 1.0, 1.0);
  const RecoverySolver recovery(mesh, sys);
  EigenResult eig = solve_eigenmode(mesh, sys, sigma, tol);
  post_process(mesh, sys, recovery, eig);
  py::dict d;
  d["omega2"] = eig.omega2;
  d["residual"] = eig.eig_residual;
  d["err_H"] = eig.err_H;
  d["err_Hhat"] = eig.err_Hhat;
  d["err_D"] = eig.err_D;
  d["err_Dhat"] = eig.err_Dhat;
  d["div_D"] = eig.div_D;
  d["div_Dhat"] = eig.div_Dhat;
  return d;
}

py::list convergence(const std::vector<int>& rs, const std::vector<int>& ns, double sigma,
                     double tol) {
  py::list out;
  for (const auto& row : convergence_study(rs, ns, sigma, tol)) {
    py::dict d;
    d["r"] = row.r;
    d["N"] = row.n;
    d["err_H"] = row.err_H;
    d["err_Hhat"] = row.err_Hhat;
    d["err_D"] = row.err_D;
    d["err_Dhat"] = row.err_Dhat;
    d["omega2"] = row.omega2;
    if (row.has_rate) {
      d["rate_H"] = row.rate_H;
      d["rate_Hhat"] = row.rate_Hhat;
      d["rate_D"] = row.rate_D;
      d["rate_Dhat"] = row.rate_Dhat;
    }
    out.append(d);
  }
  return out;
}

py::list check() {
  py::list out;
  for (const auto& res : run_all_checks())
    out.append(py::make_tuple(res.name, res.pass, res.detail));
  return out;
}

}  // namespace

PYBIND11_MODULE(_hybridem, m) {
  m.doc() = "Constraint-preserving hybrid FEM for 2-D Maxwell's equations";

  m.def("mesh_info", &mesh_info, py::arg("N"),
        "Connectivity counts of the uniform N x N grid on (0, pi)^2");
  m.def("time_domain", &time_domain, py::arg("N"), py::arg("r"), py::arg("dt"), py::arg("steps"),
        py::arg("mult_degree") = -1,
        "Leapfrog run with the reference initial data; returns per-step diagnostics");
  m.def("eigenmode", &eigenmode, py::arg("N"), py::arg("r"), py::arg("sigma") = 2.0,
        py::arg("tol") = 1e-12,
        "Eigenmode near sigma with hybrid post-processing and benchmark errors");
  m.def("convergence", &convergence, py::arg("r_list"), py::arg("N_list"),
        py::arg("sigma") = 2.0, py::arg("tol") = 1e-12,
        "Convergence table rows for the omega^2 = 2 benchmark mode");
  m.def("check", &check, "Run the invariant suites; returns (name, pass, detail) tuples");

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
