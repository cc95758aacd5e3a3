#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ehdiv/csv.hpp"
#include "ehdiv/stats.hpp"

namespace ehdiv::validation {

/// Gate criteria 1..kCriteria; determinism of the whole suite is checked by
/// running it twice, outside the suite.
constexpr int kCriteria = 12;

struct Options {
  std::uint64_t seed = 1;
  /// Multiplies horizons and sample counts. 1 is the full-size suite.
  double scale = 1.0;
  unsigned jobs = 1;
};

struct GateRow {
  int criterion = 0;
  std::string gate;
  stats::FitReport report;
};

/// Runs the gates of one criterion. Throws std::out_of_range for an unknown
/// criterion.
std::vector<GateRow> run_criterion(int criterion, const Options& options);

/// Runs criteria 1..kCriteria, sharing simulation runs between them.
std::vector<GateRow> run_all(const Options& options);

bool all_pass(const std::vector<GateRow>& rows);

/// Columns: criterion, gate, ks, tv, mean_rel_error, value, tolerance,
/// samples, pass, note.
csv::Table to_table(const std::vector<GateRow>& rows);

}  // namespace ehdiv::validation
