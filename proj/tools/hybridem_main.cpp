// Command-line driver: time-domain runs, eigenmode solves, convergence
// tables, invariant checks, and mesh queries.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "hybridem/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_file;
  int n = -1, r = -1, mult_degree = -1, steps = -1, vtk_stride = -1;
  double dt = 0.0, sigma = 0.0, t_end = 0.0;
  bool have_dt = false, have_sigma = false, have_tend = false;
  std::string out_dir, r_list, n_list;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_file, "Config file (key = value, [section] headers)");
  cmd->add_option("--N", f.n, "Grid resolution");
  cmd->add_option("--r", f.r, "Method order r (2..5)");
  cmd->add_option("--mult-degree", f.mult_degree, "Multiplier Lagrange degree (default r+1)");
  cmd->add_option("--dt", f.dt, "Time step")->each([&](const std::string&) { f.have_dt = true; });
  cmd->add_option("--steps", f.steps, "Number of time steps");
  cmd->add_option("--t-end", f.t_end, "Final time")->each([&](const std::string&) {
    f.have_tend = true;
  });
  cmd->add_option("--sigma", f.sigma, "Eigenvalue shift")->each([&](const std::string&) {
    f.have_sigma = true;
  });
  cmd->add_option("--out", f.out_dir, "Output directory (default $HYBRIDEM_OUT or ./out)");
  cmd->add_option("--vtk-stride", f.vtk_stride, "Write VTK snapshots every s steps (0 = off)");
  cmd->add_option("--r-list", f.r_list, "Comma-separated r values (convergence)");
  cmd->add_option("--N-list", f.n_list, "Comma-separated N values (convergence)");
}

std::map<std::string, std::string> to_overrides(const CommonFlags& f) {
  std::map<std::string, std::string> o;
  char buf[64];
  if (f.n >= 0) o["N"] = std::to_string(f.n);
  if (f.r >= 0) o["r"] = std::to_string(f.r);
  if (f.mult_degree >= 0) o["mult_degree"] = std::to_string(f.mult_degree);
  if (f.steps >= 0) o["steps"] = std::to_string(f.steps);
  if (f.vtk_stride >= 0) o["vtk_stride"] = std::to_string(f.vtk_stride);
  if (f.have_dt) {
    std::snprintf(buf, sizeof(buf), "%.17g", f.dt);
    o["dt"] = buf;
  }
  if (f.have_tend) {
    std::snprintf(buf, sizeof(buf), "%.17g", f.t_end);
    o["t_end"] = buf;
  }
  if (f.have_sigma) {
    std::snprintf(buf, sizeof(buf), "%.17g", f.sigma);
    o["sigma"] = buf;
  }
  if (!f.out_dir.empty()) o["out"] = f.out_dir;
  if (!f.r_list.empty()) o["r_list"] = f.r_list;
  if (!f.n_list.empty()) o["N_list"] = f.n_list;
  return o;
}

int dispatch(const std::string& kind, const CommonFlags& flags) {
  hybridem::RunConfig cfg;
  try {
    cfg = hybridem::parse_config(flags.config_file, to_overrides(flags), kind);
  } catch (const std::exception& e) {
    std::cerr << "error category=config msg=" << e.what() << "\n";
    return 2;
  }
  const hybridem::ResultBundle bundle = hybridem::run(cfg);
  for (const auto& line : bundle.report_lines) std::cout << line << "\n";
  for (const auto& file : bundle.output_files) std::cout << "wrote " << file << "\n";
  if (bundle.exit_code != 0)
    std::cerr << "error category=" << bundle.error_category << " msg=" << bundle.error_message
              << "\n";
  return bundle.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybridem: constraint-preserving hybrid FEM for 2-D Maxwell's equations"};
  app.require_subcommand(1);

  std::map<std::string, CommonFlags> flags;
  for (const std::string kind : {"time", "eigen", "convergence", "check", "mesh-info"}) {
    CLI::App* cmd = app.add_subcommand(kind);
    add_common(cmd, flags[kind]);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string kind = app.get_subcommands().front()->get_name();
  return dispatch(kind, flags[kind]);
}
