#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "linearize4/verify.hpp"

namespace lin4 {

// One job: a subcommand plus the parameter block and the options that
// influence it. Parameters are expression strings; a missing entry defaults
// to the symbol of the same name (fully symbolic runs).
struct JobConfig {
  std::string command;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  GridSpec grid;
  std::array<double, 4> constants{1.0, 0.5, 0.25, 0.125};

  // Merges a config document; unknown keys are rejected.
  void merge_json(const nlohmann::json& doc);
  PdeParams pde_params() const;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 not linearizable, 2 input error, 3 residual fail
  nlohmann::json report;
};

// Executes one job. Configuration problems throw EngineError (exit 2 at the
// CLI); everything else is reported in-band with the documented exit codes.
RunResult run_job(const JobConfig& cfg);

// Human-readable rendering of a report.
std::string render_pretty(const nlohmann::json& report);

// Fixed 17-significant-digit decimal form used for every floating-point
// report field (keeps reports byte-identical across runs).
std::string format_number(double v);

}  // namespace lin4
