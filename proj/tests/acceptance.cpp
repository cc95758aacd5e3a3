// Acceptance harness: one PASS/FAIL line per criterion, preceded by the
// individual gates. `acceptance` runs everything; `--criterion K` runs one.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "ehdiv/experiment.hpp"
#include "ehdiv/validation.hpp"

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kDeterminism = 13;

struct Budget {
  int criterion;
  double seconds;
};

// Wall-clock budgets on one core.
constexpr Budget kBudgets[] = {{1, 30.0}, {10, 600.0}};

void print_gate(const ehdiv::validation::GateRow& g) {
  const auto& r = g.report;
  std::printf("  %-4s %-42s value=%-14s tol=%-10s %s\n", r.pass ? "ok" : "FAIL", g.gate.c_str(),
              ehdiv::csv::format(r.value).c_str(), ehdiv::csv::format(r.tolerance).c_str(), r.note.c_str());
}

bool gate_criterion(int k, const ehdiv::validation::Options& options) {
  const auto start = Clock::now();
  const auto rows = ehdiv::validation::run_criterion(k, options);
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  for (const auto& g : rows) print_gate(g);
  bool pass = ehdiv::validation::all_pass(rows);
  std::string extra;
  for (const auto& b : kBudgets) {
    if (b.criterion != k) continue;
    const bool in_budget = elapsed < b.seconds * (options.scale < 1.0 ? 1.0 : options.scale);
    std::printf("  %-4s %-42s value=%-14.3f tol=%-10.0f wall-clock seconds\n", in_budget ? "ok" : "FAIL", "runtime",
                elapsed, b.seconds);
    pass = pass && in_budget;
  }
  std::size_t failed = 0;
  for (const auto& g : rows) failed += !g.report.pass;
  std::printf("%s criterion %d (%zu gates, %zu failed, %.1f s)\n", pass ? "PASS" : "FAIL", k, rows.size(), failed,
              elapsed);
  return pass;
}

bool determinism(const ehdiv::validation::Options& options) {
  // Two validate runs with the same seed, the second on more threads.
  auto spec = ehdiv::cli::ExperimentSpec::defaults(ehdiv::cli::Command::validate);
  spec.seed = options.seed;
  spec.scale = 0.02 * options.scale;
  spec.jobs = 1;
  const auto start = Clock::now();
  const std::string first = ehdiv::cli::cmd_validate(spec).table.str();
  spec.jobs = 3;
  const std::string second = ehdiv::cli::cmd_validate(spec).table.str();
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  const bool same = first == second && !first.empty();
  std::printf("  %-4s %-42s bytes=%zu/%zu\n", same ? "ok" : "FAIL", "validate_csv_identical", first.size(),
              second.size());
  std::printf("%s criterion %d (validate twice at scale %g, %.1f s)\n", same ? "PASS" : "FAIL", kDeterminism,
              spec.scale, elapsed);
  return same;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  ehdiv::validation::Options options;
  app.add_option("--criterion", only, "Run a single criterion (1-13); 0 runs all")->check(CLI::Range(0, 13));
  app.add_option("--scale", options.scale, "Scale horizons and sample counts");
  app.add_option("--seed", options.seed, "Seed");
  app.add_option("--jobs", options.jobs, "Worker threads");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (int k = 1; k <= kDeterminism; ++k) {
    if (only != 0 && k != only) continue;
    const bool pass = k == kDeterminism ? determinism(options) : gate_criterion(k, options);
    std::fflush(stdout);
    all = all && pass;
  }
  return all ? 0 : 1;
}
