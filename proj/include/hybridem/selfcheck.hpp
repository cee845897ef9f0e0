#pragma once

#include <string>
#include <vector>

namespace hybridem {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Invariant suites across all modules: quadrature exactness, basis
/// unisolvence and derivative checks, mesh invariants, kernel identities,
/// assembly symmetry/consistency, solver oracles, and a short conservation
/// run. Deterministic (fixed seeds).
std::vector<CheckResult> run_all_checks();

}  // namespace hybridem
