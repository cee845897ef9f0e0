#include "hybridem/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hybridem/selfcheck.hpp"
#include "hybridem/vtk.hpp"

namespace hybridem {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text,
                std::vector<std::string>& outputs) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open " + path);
  out << text;
  outputs.push_back(path);
}

void write_metadata(const RunConfig& cfg, const ResultBundle& bundle, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open " + path);
  out << "kind = " << kind_name(cfg.kind) << "\n"
      << "nonconforming = " << (bundle.nonconforming ? "true" : "false") << "\n"
      << "wall_seconds = " << fmt(bundle.wall_seconds) << "\n"
      << "--- config echo ---\n"
      << cfg.echo;
}

void vtk_snapshot(const Mesh& mesh, const TimeDomainProblem& problem, const TimeState& state,
                  const std::string& path, std::vector<std::string>& outputs) {
  const SystemMatrices& sys = problem.sys;
  Eigen::Matrix2Xd centroid(2, 1);
  centroid << 1.0 / 3.0, 1.0 / 3.0;
  const Eigen::VectorXd d_broken = problem.lift(state.d_red);
  const Eigen::VectorXd dhat_broken = sys.div.embedding * state.dhat;
  VtkCellData data;
  Eigen::Matrix2Xd dvals(2, mesh.num_cells()), dhvals(2, mesh.num_cells());
  Eigen::VectorXd ddiv(mesh.num_cells()), dhdiv(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    dvals.col(c) = eval_broken_vector(mesh, sys.k, d_broken, c, centroid).col(0);
    dhvals.col(c) = eval_broken_vector(mesh, sys.div_degree, dhat_broken, c, centroid).col(0);
    ddiv[c] = eval_broken_vector_div(mesh, sys.k, d_broken, c, centroid)[0];
    dhdiv[c] = eval_broken_vector_div(mesh, sys.div_degree, dhat_broken, c, centroid)[0];
  }
  data.vectors.emplace_back("D", dvals);
  data.vectors.emplace_back("Dhat", dhvals);
  data.scalars.emplace_back("div_D", ddiv);
  data.scalars.emplace_back("div_Dhat", dhdiv);
  write_vtk_cell_data(mesh, path, data);
  outputs.push_back(path);
}

void run_time(const RunConfig& cfg, ResultBundle& bundle) {
  const Mesh mesh = generate_uniform_grid(cfg.n, {0.0, 0.0, M_PI, M_PI});
  const KernelMode mode =
      (cfg.mult_degree >= cfg.r + 1) ? KernelMode::Conforming : KernelMode::NullspaceBasis;
  bundle.nonconforming = cfg.nonconforming();
  const TimeDomainProblem problem =
      setup_time_domain(mesh, cfg.r, cfg.mult_degree, cfg.eps, cfg.mu, mode, cfg.rank_tol);

  // reference initial data: A0 = (y(pi-y), x(pi-x)), D0 = Dhat0 = 0
  const Eigen::VectorXd a0_broken = project_broken_vector(
      mesh, cfg.r - 1,
      [](const Eigen::Vector2d& x) {
        return Eigen::Vector2d(x.y() * (M_PI - x.y()), x.x() * (M_PI - x.x()));
      },
      2 * cfg.r + 4);
  const Eigen::VectorXd a0 = embedded_coefficients(problem.kernel, a0_broken);
  const Eigen::VectorXd d0 = Eigen::VectorXd::Zero(problem.reduced_dim());
  const Eigen::VectorXd dhat0 = init_Dhat(problem, Eigen::VectorXd::Zero(problem.sys.broken_dim()),
                                          [](const Eigen::Vector2d&) { return 0.0; },
                                          cfg.rank_tol);

  TimeState state = make_initial_state(problem, a0, d0, dhat0);
  const SourceSpec sources = zero_sources();

  std::vector<StepRecord> records;
  records.push_back(diagnostics_record(problem, state, sources));
  const std::filesystem::path dir(cfg.out_dir);
  if (cfg.vtk_stride > 0)
    vtk_snapshot(mesh, problem, state, (dir / "fields_000000.vtk").string(),
                 bundle.output_files);
  for (long n = 0; n < cfg.steps; ++n) {
    leapfrog_step(problem, state, cfg.dt, sources);
    records.push_back(diagnostics_record(problem, state, sources));
    if (cfg.vtk_stride > 0 && state.n % cfg.vtk_stride == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "fields_%06ld.vtk", state.n);
      vtk_snapshot(mesh, problem, state, (dir / name).string(), bundle.output_files);
    }
  }

  write_file((dir / "time_series.csv").string(), format_time_csv(records), bundle.output_files);
  const StepRecord& last = records.back();
  bundle.report_lines.push_back("steps = " + std::to_string(cfg.steps) +
                                ", t_end = " + fmt(state.t));
  bundle.report_lines.push_back("final |D|_Hdiv = " + fmt(last.seminorm_D) +
                                ", final |Dhat|_Hdiv = " + fmt(last.seminorm_Dhat));
  bundle.report_lines.push_back("max flux residual = " + fmt(last.flux_residual_max) +
                                ", constraint residual = " + fmt(last.constraint_residual));
}

void fields_snapshot(const Mesh& mesh, const SystemMatrices& sys,
                     const Eigen::VectorXd& d_broken, const Eigen::VectorXd& dhat_broken,
                     const std::string& path, std::vector<std::string>& outputs) {
  Eigen::Matrix2Xd centroid(2, 1);
  centroid << 1.0 / 3.0, 1.0 / 3.0;
  VtkCellData data;
  Eigen::Matrix2Xd dvals(2, mesh.num_cells()), dhvals(2, mesh.num_cells());
  Eigen::VectorXd ddiv(mesh.num_cells()), dhdiv(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    dvals.col(c) = eval_broken_vector(mesh, sys.k, d_broken, c, centroid).col(0);
    dhvals.col(c) = eval_broken_vector(mesh, sys.div_degree, dhat_broken, c, centroid).col(0);
    ddiv[c] = eval_broken_vector_div(mesh, sys.k, d_broken, c, centroid)[0];
    dhdiv[c] = eval_broken_vector_div(mesh, sys.div_degree, dhat_broken, c, centroid)[0];
  }
  data.vectors.emplace_back("D", dvals);
  data.vectors.emplace_back("Dhat", dhvals);
  data.scalars.emplace_back("div_D", ddiv);
  data.scalars.emplace_back("div_Dhat", dhdiv);
  write_vtk_cell_data(mesh, path, data);
  outputs.push_back(path);
}

void run_eigen(const RunConfig& cfg, ResultBundle& bundle) {
  const Mesh mesh = generate_uniform_grid(cfg.n, {0.0, 0.0, M_PI, M_PI});
  bundle.nonconforming = cfg.nonconforming();
  const SystemMatrices sys = assemble(mesh, cfg.r - 1, cfg.mult_degree, cfg.eps, cfg.mu);
  const RecoverySolver recovery(mesh, sys, cfg.rank_tol);
  EigenResult eig = solve_eigenmode(mesh, sys, cfg.sigma, cfg.eig_tol);
  post_process(mesh, sys, recovery, eig);

  if (cfg.vtk_stride > 0) {
    const double omega = std::sqrt(eig.omega2);
    fields_snapshot(mesh, sys, (sys.eps * omega) * eig.a_broken, sys.div.embedding * eig.dhat,
                    (std::filesystem::path(cfg.out_dir) / "eigen_fields.vtk").string(),
                    bundle.output_files);
  }

  std::ostringstream csv;
  csv << "r,N,omega2,err_H,err_Hhat,err_D,err_Dhat,div_D,div_Dhat\n"
      << cfg.r << "," << cfg.n << "," << fmt(eig.omega2) << "," << fmt(eig.err_H) << ","
      << fmt(eig.err_Hhat) << "," << fmt(eig.err_D) << "," << fmt(eig.err_Dhat) << ","
      << fmt(eig.div_D) << "," << fmt(eig.div_Dhat) << "\n";
  write_file((std::filesystem::path(cfg.out_dir) / "eigen.csv").string(), csv.str(),
             bundle.output_files);
  bundle.report_lines.push_back("omega2 = " + fmt(eig.omega2));
  bundle.report_lines.push_back("err_H = " + fmt(eig.err_H) + ", err_Hhat = " + fmt(eig.err_Hhat));
  bundle.report_lines.push_back("err_D = " + fmt(eig.err_D) + ", err_Dhat = " + fmt(eig.err_Dhat));
  bundle.report_lines.push_back("|div Dhat| = " + fmt(eig.div_Dhat) + " (|div D| = " +
                                fmt(eig.div_D) + ")");
}

void run_convergence(const RunConfig& cfg, ResultBundle& bundle) {
  const std::vector<ConvergenceRow> rows =
      convergence_study(cfg.r_list, cfg.n_list, cfg.sigma, cfg.eig_tol);
  write_file((std::filesystem::path(cfg.out_dir) / "convergence.csv").string(),
             format_convergence_csv(rows), bundle.output_files);
  for (const auto& row : rows) {
    std::ostringstream line;
    line << "r=" << row.r << " N=" << row.n << " err_Hhat=" << fmt(row.err_Hhat);
    if (row.has_rate) line << " rate_Hhat=" << fmt(row.rate_Hhat);
    bundle.report_lines.push_back(line.str());
  }
}

void run_check(const RunConfig&, ResultBundle& bundle) {
  const std::vector<CheckResult> results = run_all_checks();
  int failures = 0;
  for (const auto& res : results) {
    bundle.report_lines.push_back(std::string(res.pass ? "PASS " : "FAIL ") + res.name + ": " +
                                  res.detail);
    failures += res.pass ? 0 : 1;
  }
  if (failures > 0) {
    bundle.exit_code = 5;
    bundle.error_category = "check";
    bundle.error_message = std::to_string(failures) + " invariant suite(s) failed";
  }
}

void run_mesh_info(const RunConfig& cfg, ResultBundle& bundle) {
  const Mesh mesh = generate_uniform_grid(cfg.n, {0.0, 0.0, M_PI, M_PI});
  bundle.report_lines.push_back(std::to_string(mesh.num_cells()) + " cells");
  bundle.report_lines.push_back(std::to_string(mesh.num_vertices()) + " vertices");
  bundle.report_lines.push_back(std::to_string(mesh.num_edges()) + " edges (" +
                                std::to_string(mesh.num_boundary_edges()) + " boundary, " +
                                std::to_string(mesh.num_interior_edges()) + " interior)");
  bundle.report_lines.push_back("h = " + fmt(mesh.h));
  if (cfg.vtk_stride > 0) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = (std::filesystem::path(cfg.out_dir) / "mesh.vtk").string();
    write_vtk_mesh(mesh, path);
    bundle.output_files.push_back(path);
  }
}

}  // namespace

ResultBundle run(const RunConfig& cfg) {
  ResultBundle bundle;
  bundle.config_echo = cfg.echo;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (cfg.kind != RunKind::Check && cfg.kind != RunKind::MeshInfo)
      std::filesystem::create_directories(cfg.out_dir);
    switch (cfg.kind) {
      case RunKind::Time: run_time(cfg, bundle); break;
      case RunKind::Eigen: run_eigen(cfg, bundle); break;
      case RunKind::Convergence: run_convergence(cfg, bundle); break;
      case RunKind::Check: run_check(cfg, bundle); break;
      case RunKind::MeshInfo: run_mesh_info(cfg, bundle); break;
    }
  } catch (const std::invalid_argument& e) {
    bundle.exit_code = 2;
    bundle.error_category = "config";
    bundle.error_message = e.what();
  } catch (const std::ios_base::failure& e) {
    bundle.exit_code = 4;
    bundle.error_category = "io";
    bundle.error_message = e.what();
  } catch (const std::exception& e) {
    bundle.exit_code = 3;
    bundle.error_category = "solver";
    bundle.error_message = e.what();
  }
  bundle.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (bundle.exit_code == 0 && cfg.kind != RunKind::Check && cfg.kind != RunKind::MeshInfo) {
    try {
      write_metadata(cfg, bundle,
                     (std::filesystem::path(cfg.out_dir) / "run_metadata.txt").string());
    } catch (const std::exception& e) {
      bundle.exit_code = 4;
      bundle.error_category = "io";
      bundle.error_message = e.what();
    }
  }
  return bundle;
}

std::string format_time_csv(const std::vector<StepRecord>& records) {
  std::ostringstream out;
  out << "step,t,seminorm_D,seminorm_Dhat,flux_residual_max,constraint_residual,energy\n";
  for (const auto& r : records)
    out << r.step << "," << fmt(r.t) << "," << fmt(r.seminorm_D) << "," << fmt(r.seminorm_Dhat)
        << "," << fmt(r.flux_residual_max) << "," << fmt(r.constraint_residual) << ","
        << fmt(r.energy) << "\n";
  return out.str();
}

std::string format_convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "r,N,err_H,rate_H,err_Hhat,rate_Hhat,err_D,rate_D,err_Dhat,rate_Dhat\n";
  for (const auto& row : rows) {
    out << row.r << "," << row.n << "," << fmt(row.err_H) << ","
        << (row.has_rate ? fmt(row.rate_H) : "") << "," << fmt(row.err_Hhat) << ","
        << (row.has_rate ? fmt(row.rate_Hhat) : "") << "," << fmt(row.err_D) << ","
        << (row.has_rate ? fmt(row.rate_D) : "") << "," << fmt(row.err_Dhat) << ","
        << (row.has_rate ? fmt(row.rate_Dhat) : "") << "\n";
  }
  return out.str();
}

std::vector<ConvergenceRow> parse_convergence_csv(const std::string& text) {
  std::vector<ConvergenceRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    while (fields.size() < 10) fields.push_back("");
    ConvergenceRow row;
    row.r = std::stoi(fields[0]);
    row.n = std::stoi(fields[1]);
    row.err_H = std::stod(fields[2]);
    row.err_Hhat = std::stod(fields[4]);
    row.err_D = std::stod(fields[6]);
    row.err_Dhat = std::stod(fields[8]);
    row.has_rate = !fields[3].empty();
    if (row.has_rate) {
      row.rate_H = std::stod(fields[3]);
      row.rate_Hhat = std::stod(fields[5]);
      row.rate_D = std::stod(fields[7]);
      row.rate_Dhat = std::stod(fields[9]);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hybridem
