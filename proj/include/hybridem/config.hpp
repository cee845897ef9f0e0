#pragma once

#include <map>
#include <string>
#include <vector>

namespace hybridem {

enum class RunKind { Time, Eigen, Convergence, Check, MeshInfo };

/// Validated run configuration. Defaults follow the reference experiments:
/// eps = mu = 1, sigma = 2, multiplier degree r+1, zero sources.
struct RunConfig {
  RunKind kind = RunKind::Eigen;
  int n = 16;
  int r = 2;
  int mult_degree = 3;  // r + 1 unless overridden
  bool mult_degree_set = false;
  double eps = 1.0;
  double mu = 1.0;
  double rank_tol = 1e-10;

  // time
  double dt = 0.0;
  long steps = 0;
  double t_end = 0.0;

  // eigen
  double sigma = 2.0;
  double eig_tol = 1e-12;

  // convergence
  std::vector<int> r_list{2, 3, 4, 5};
  std::vector<int> n_list{2, 4, 8, 16, 32};

  std::string out_dir;
  int vtk_stride = 0;

  std::string echo;  // raw config text plus overrides, for reproducibility records

  bool nonconforming() const { return mult_degree < r + 1; }
};

/// Parse the plain-text config (key = value lines, optional [section]
/// headers giving section.key names) and apply flag overrides on top.
/// Unknown keys and out-of-range values raise std::invalid_argument naming
/// the offending key.
RunConfig parse_config(const std::string& path,
                       const std::map<std::string, std::string>& overrides,
                       const std::string& kind_hint = "");

std::string kind_name(RunKind kind);

}  // namespace hybridem
