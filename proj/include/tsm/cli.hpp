#pragma once

// Command-line front end: equilibrium | scenario | sweep | verify.
// Options may come from a flat `key = value` file given with --config;
// flags on the command line win. Unknown keys are rejected.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tsm/market.hpp"
#include "tsm/population.hpp"
#include "tsm/scenarios.hpp"
#include "tsm/sweep.hpp"
#include "tsm/verify.hpp"

namespace tsm::cli {

enum ExitCode : int { kSuccess = 0, kInvalidInput = 1, kInfeasible = 2, kVerificationFailed = 3 };

enum class Command { equilibrium, scenario, sweep, verify };

struct RunConfig {
  Command command = Command::equilibrium;
  MarketParams params;       // equilibrium
  PopulationSpec population; // scenario, sweep, verify
  std::vector<ScenarioTag> scenarios{std::begin(kAllScenarios), std::end(kAllScenarios)};
  TwoSidedMode mode = TwoSidedMode::equilibrium;
  SweepSpec sweep;
  std::optional<std::string> preset;
  std::vector<Metric> metrics;  // preset columns; empty = full schema
  VerifyOptions verify;
  std::optional<std::string> out_path;
  std::string format = "csv";
};

/// Parses argv (argv[0] is the program name). Throws std::invalid_argument on
/// bad values; CLI11 parse errors propagate as CLI::ParseError.
RunConfig parse_args(int argc, const char* const* argv);

/// Executes a parsed configuration; returns an ExitCode.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + execute with every error mapped to an exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsm::cli
