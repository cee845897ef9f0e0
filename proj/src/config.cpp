#include "hybridem/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hybridem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_int(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: key '" + key + "' expects a list");
  return out;
}

RunKind parse_kind(const std::string& v) {
  if (v == "time") return RunKind::Time;
  if (v == "eigen") return RunKind::Eigen;
  if (v == "convergence") return RunKind::Convergence;
  if (v == "check") return RunKind::Check;
  if (v == "mesh-info") return RunKind::MeshInfo;
  throw std::invalid_argument("config: unknown kind '" + v + "'");
}

}  // namespace

std::string kind_name(RunKind kind) {
  switch (kind) {
    case RunKind::Time: return "time";
    case RunKind::Eigen: return "eigen";
    case RunKind::Convergence: return "convergence";
    case RunKind::Check: return "check";
    case RunKind::MeshInfo: return "mesh-info";
  }
  return "?";
}

RunConfig parse_config(const std::string& path,
                       const std::map<std::string, std::string>& overrides,
                       const std::string& kind_hint) {
  RunConfig cfg;
  std::map<std::string, std::string> kv;
  std::string echo;

  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::string line, section;
    while (std::getline(in, line)) {
      echo += line + "\n";
      const std::string s = trim(line);
      if (s.empty() || s[0] == '#') continue;
      if (s.front() == '[' && s.back() == ']') {
        section = trim(s.substr(1, s.size() - 2));
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config: malformed line '" + s + "'");
      std::string key = trim(s.substr(0, eq));
      const std::string val = trim(s.substr(eq + 1));
      if (!section.empty()) key = section + "." + key;
      kv[key] = val;
    }
  }
  if (!kind_hint.empty()) kv["kind"] = kind_hint;
  for (const auto& [k, v] : overrides) {
    kv[k] = v;
    echo += "# override: " + k + " = " + v + "\n";
  }
  cfg.echo = echo;

  bool have_dt = false, have_steps = false, have_tend = false;
  for (const auto& [key, val] : kv) {
    if (key == "kind") cfg.kind = parse_kind(val);
    else if (key == "N" || key == "mesh.N") cfg.n = to_int(key, val);
    else if (key == "r" || key == "fem.r") cfg.r = to_int(key, val);
    else if (key == "mult_degree" || key == "fem.mult_degree") {
      cfg.mult_degree = to_int(key, val);
      cfg.mult_degree_set = true;
    } else if (key == "eps" || key == "material.eps") cfg.eps = to_double(key, val);
    else if (key == "mu" || key == "material.mu") cfg.mu = to_double(key, val);
    else if (key == "rank_tol") cfg.rank_tol = to_double(key, val);
    else if (key == "dt" || key == "time.dt") { cfg.dt = to_double(key, val); have_dt = true; }
    else if (key == "steps" || key == "time.steps") { cfg.steps = to_int(key, val); have_steps = true; }
    else if (key == "t_end" || key == "time.t_end") { cfg.t_end = to_double(key, val); have_tend = true; }
    else if (key == "sigma" || key == "eigen.sigma") cfg.sigma = to_double(key, val);
    else if (key == "tol" || key == "eigen.tol") cfg.eig_tol = to_double(key, val);
    else if (key == "r_list" || key == "convergence.r_list") cfg.r_list = to_int_list(key, val);
    else if (key == "N_list" || key == "convergence.N_list") cfg.n_list = to_int_list(key, val);
    else if (key == "out" || key == "output.dir") cfg.out_dir = val;
    else if (key == "vtk_stride" || key == "output.vtk_stride") cfg.vtk_stride = to_int(key, val);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }

  if (!cfg.mult_degree_set) cfg.mult_degree = cfg.r + 1;
  if (cfg.out_dir.empty()) {
    const char* env = std::getenv("HYBRIDEM_OUT");
    cfg.out_dir = (env != nullptr && env[0] != '\0') ? env : "out";
  }

  // validation
  if (cfg.n < 1) throw std::invalid_argument("config: key 'N' out of range (N >= 1)");
  if (cfg.r < 2 || cfg.r > 5) throw std::invalid_argument("config: key 'r' out of range (2..5)");
  if (cfg.mult_degree < 2 || cfg.mult_degree > 7)
    throw std::invalid_argument("config: key 'mult_degree' out of range (2..7)");
  if (cfg.eps <= 0.0) throw std::invalid_argument("config: key 'eps' must be positive");
  if (cfg.mu <= 0.0) throw std::invalid_argument("config: key 'mu' must be positive");
  if (cfg.vtk_stride < 0) throw std::invalid_argument("config: key 'vtk_stride' must be >= 0");
  for (int r : cfg.r_list)
    if (r < 2 || r > 5) throw std::invalid_argument("config: key 'r_list' entries in 2..5");
  for (int n : cfg.n_list)
    if (n < 1) throw std::invalid_argument("config: key 'N_list' entries must be >= 1");

  if (cfg.kind == RunKind::Time) {
    // dt * steps = t_end; derive the missing quantity
    if (have_dt && have_steps && have_tend) {
      if (std::abs(cfg.dt * cfg.steps - cfg.t_end) > 1e-9 * std::max(1.0, std::abs(cfg.t_end)))
        throw std::invalid_argument("config: dt * steps != t_end");
    } else if (have_dt && have_steps) {
      cfg.t_end = cfg.dt * cfg.steps;
    } else if (have_dt && have_tend) {
      cfg.steps = std::lround(cfg.t_end / cfg.dt);
    } else if (have_steps && have_tend) {
      cfg.dt = cfg.t_end / cfg.steps;
    } else if (!have_dt && !have_steps && !have_tend) {
      cfg.dt = M_PI / 512.0;
      cfg.steps = 1024;
      cfg.t_end = cfg.dt * cfg.steps;
    } else {
      throw std::invalid_argument("config: time runs need two of dt, steps, t_end");
    }
    if (cfg.dt <= 0.0 || cfg.steps < 1)
      throw std::invalid_argument("config: key 'dt'/'steps' out of range");
  }
  return cfg;
}

}  // namespace hybridem
