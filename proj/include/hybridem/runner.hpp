#pragma once

#include <string>
#include <vector>

#include "hybridem/config.hpp"
#include "hybridem/frequencydomain.hpp"
#include "hybridem/timedomain.hpp"

namespace hybridem {

/// Outcome of a CLI run; exit_code 0 on success, otherwise a nonzero code
/// with a machine-readable category (config | solver | io | check).
struct ResultBundle {
  int exit_code = 0;
  std::string error_category;
  std::string error_message;
  std::string config_echo;
  double wall_seconds = 0.0;
  std::vector<std::string> output_files;
  std::vector<std::string> report_lines;  // printed by the CLI
  bool nonconforming = false;
};

ResultBundle run(const RunConfig& cfg);

std::string format_time_csv(const std::vector<StepRecord>& records);
std::string format_convergence_csv(const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> parse_convergence_csv(const std::string& text);

}  // namespace hybridem
