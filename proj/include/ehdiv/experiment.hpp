#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ehdiv/csv.hpp"
#include "ehdiv/policies.hpp"

namespace ehdiv::cli {

enum class Command { simulate, sweep, normalized_sweep, analytic, validate, fig2 };

/// Bad command line or configuration; maps to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Accepts `simulate`, `sweep`, `normalized-sweep` (or `normalized_sweep`),
/// `analytic`, `validate`, `fig2`.
Command parse_command(std::string_view text);
std::string command_name(Command command);

struct ExperimentSpec {
  Command command = Command::sweep;
  std::vector<std::size_t> n_list{2, 5, 10, 20, 50, 100, 200, 500};
  double p = 0.5;
  std::vector<PolicySpec> schemes;
  std::uint64_t horizon = 1'000'000;
  std::optional<std::uint64_t> burn_in;
  std::uint64_t seed = 1;
  std::uint64_t replications = 20;
  /// Empty means standard output.
  std::string output_path;
  unsigned jobs = 1;
  /// validate only: scales horizons and sample counts.
  double scale = 1.0;

  /// Per-command defaults: simulate runs greedy at N = 10 once; sweeps run
  /// every scheme on the default grid.
  static ExperimentSpec defaults(Command command);

  std::uint64_t effective_burn_in() const;
  /// Throws UsageError.
  void validate() const;
};

/// Schemes swept when none are given.
std::vector<PolicySpec> default_sweep_schemes();

struct CommandResult {
  csv::Table table;
  /// 0 = success, 1 = a validation gate failed.
  int exit_code = 0;
  /// Human-readable summary for stderr (failing gates).
  std::string message;
};

CommandResult cmd_simulate(const ExperimentSpec& spec);
/// Handles both sweep and normalized-sweep.
CommandResult cmd_sweep(const ExperimentSpec& spec);
CommandResult cmd_analytic(const ExperimentSpec& spec);
CommandResult cmd_validate(const ExperimentSpec& spec);
/// x = 0.001 .. 1 in steps of 0.001 at the first N of the list (defaults to
/// 1001).
CommandResult cmd_fig2(const ExperimentSpec& spec);

CommandResult dispatch(const ExperimentSpec& spec);

}  // namespace ehdiv::cli
