#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hybridem/assembly.hpp"
#include "hybridem/recovery.hpp"
#include "hybridem/solvers.hpp"

namespace hybridem {

/// Impressed current and charge density; defaults are identically zero.
/// The pair is expected to satisfy charge conservation, rho_dot + div J = 0.
struct SourceSpec {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> current;
  std::function<double(const Eigen::Vector2d&, double)> charge;
  std::function<double(const Eigen::Vector2d&, double)> charge_rate;  // optional, for the check
  bool zero = true;

  VectorField current_at(double t) const {
    return [this, t](const Eigen::Vector2d& x) { return current(x, t); };
  }
  ScalarField charge_at(double t) const {
    return [this, t](const Eigen::Vector2d& x) { return charge(x, t); };
  }
};

SourceSpec zero_sources();

/// Quadrature check of rho_dot + div J = 0 at t = 0 (needs charge_rate).
/// Returns the residual in a weak per-cell sense.
double check_charge_compatibility(const Mesh& mesh, const SourceSpec& sources, int scalar_degree,
                                  int quad_degree);

/// Fixed data for a time-domain run: assembled forms, the kernel basis the
/// evolution lives on, and pre-factored solvers.
struct TimeDomainProblem {
  const Mesh* mesh = nullptr;
  SystemMatrices sys;
  Eigen::SparseMatrix<double> kernel;  // conforming embedding P, or computed Z
  bool conforming_mode = true;
  SpdSolver reduced_mass;                            // kernel^T M_plain kernel
  Eigen::SparseMatrix<double> reduced_mass_mat, reduced_stiffness;
  std::unique_ptr<RecoverySolver> recovery;
  int quad_degree = 6;

  long reduced_dim() const { return kernel.cols(); }
  Eigen::VectorXd lift(const Eigen::VectorXd& reduced) const { return kernel * reduced; }
};

/// mode "conforming" evolves on the constructed edge space; "kernel" uses a
/// numerically computed null-space basis of B (desk scale only).
enum class KernelMode { Conforming, NullspaceBasis };

TimeDomainProblem setup_time_domain(const Mesh& mesh, int r, int mult_degree, double eps,
                                    double mu, KernelMode mode = KernelMode::Conforming,
                                    double rank_tol = 1e-10);

struct TimeState {
  double t = 0.0;
  long n = 0;
  Eigen::VectorXd a_red, d_red;  // kernel coordinates
  Eigen::VectorXd dhat;          // div-space coefficients
  Eigen::VectorXd hhat_half;     // multiplier trace from the last step
};

/// Charge-compatible initial flux: the minimizer of ||Dhat - D_0||_{L2}
/// subject to the per-cell constraint rows and element-wise div Dhat = P(rho_0).
/// Throws when D_0 violates the compatibility hypothesis beyond rank_tol.
Eigen::VectorXd init_Dhat(const TimeDomainProblem& problem, const Eigen::VectorXd& d0_broken,
                          const ScalarField& rho0, double rank_tol = 1e-10);

TimeState make_initial_state(const TimeDomainProblem& problem, const Eigen::VectorXd& a0_red,
                             const Eigen::VectorXd& d0_red, const Eigen::VectorXd& dhat0);

/// One leapfrog step: half kick, kernel-space velocity solve, trace recovery
/// and flux update at the half step, half kick.
void leapfrog_step(const TimeDomainProblem& problem, TimeState& state, double dt,
                   const SourceSpec& sources);

struct StepRecord {
  long step = 0;
  double t = 0.0;
  double seminorm_D = 0.0;
  double seminorm_Dhat = 0.0;
  double flux_residual_max = 0.0;
  double constraint_residual = 0.0;
  double energy = 0.0;
};

StepRecord diagnostics_record(const TimeDomainProblem& problem, const TimeState& state,
                              const SourceSpec& sources);

struct TimeDomainResult {
  std::vector<StepRecord> records;
  TimeState state;
};

TimeDomainResult run_leapfrog(const TimeDomainProblem& problem, TimeState state, double dt,
                              long steps, const SourceSpec& sources, bool record = true,
                              const std::function<void(const TimeState&)>& on_step = {});

}  // namespace hybridem
