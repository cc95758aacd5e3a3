// ehdiv: command-line front end for simulation sweeps, closed forms and the
// validation suite. Exit status: 0 ok, 1 failed gate or runtime error,
// 2 usage or configuration error.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehdiv/experiment.hpp"

namespace {

constexpr int kUsage = 2;

struct Flags {
  std::string command;
  std::vector<std::size_t> n;
  double p = 0.5;
  std::vector<std::string> schemes;
  std::uint64_t horizon = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 1;
  std::uint64_t reps = 1;
  std::string out;
  unsigned jobs = 1;
  double scale = 1.0;
};

ehdiv::cli::ExperimentSpec build_spec(const CLI::App& app, const Flags& f) {
  using ehdiv::cli::ExperimentSpec;
  ExperimentSpec spec = ExperimentSpec::defaults(ehdiv::cli::parse_command(f.command));
  if (app.count("--n") > 0) spec.n_list = f.n;
  if (app.count("--p") > 0) spec.p = f.p;
  if (app.count("--scheme") > 0) {
    spec.schemes.clear();
    for (const auto& s : f.schemes) {
      try {
        spec.schemes.push_back(ehdiv::PolicySpec::parse(s));
      } catch (const std::invalid_argument& e) {
        throw ehdiv::cli::UsageError(e.what());
      }
    }
  }
  if (app.count("--horizon") > 0) spec.horizon = f.horizon;
  if (app.count("--burn-in") > 0) spec.burn_in = f.burn_in;
  if (app.count("--seed") > 0) spec.seed = f.seed;
  if (app.count("--reps") > 0) spec.replications = f.reps;
  if (app.count("--out") > 0) spec.output_path = f.out;
  if (app.count("--jobs") > 0) spec.jobs = f.jobs;
  if (app.count("--scale") > 0) spec.scale = f.scale;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-harvesting multiuser access simulator"};
  Flags f;
  app.add_option("command", f.command, "simulate | sweep | normalized-sweep | analytic | validate | fig2")
      ->required();
  app.set_config("--config", "", "Flat key = value file mirroring the long flags; flags override it");
  app.add_option("--n", f.n, "User counts, comma separated")->delimiter(',');
  app.add_option("--p", f.p, "Bernoulli arrival probability");
  app.add_option("--scheme", f.schemes,
                 "greedy, tdma, aloha[:alpha], energy_aware, fixed_power[:level], p2p_greedy, contention:q")
      ->delimiter(',');
  app.add_option("--horizon", f.horizon, "Slots per run");
  app.add_option("--burn-in", f.burn_in, "Slots discarded before measuring (default: horizon / 10)");
  app.add_option("--seed", f.seed, "Base seed");
  app.add_option("--reps", f.reps, "Replications per point");
  app.add_option("--out", f.out, "Output CSV path (default: standard output)");
  app.add_option("--jobs", f.jobs, "Worker threads");
  app.add_option("--scale", f.scale, "validate: multiplies horizons and sample counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    const auto spec = build_spec(app, f);
    spec.validate();
    const auto result = ehdiv::cli::dispatch(spec);
    if (spec.output_path.empty()) {
      result.table.write(std::cout);
      std::cout.flush();
    } else {
      std::ofstream file(spec.output_path, std::ios::binary);
      if (!file) throw ehdiv::cli::UsageError("cannot open " + spec.output_path + " for writing");
      result.table.write(file);
      if (!file.flush()) throw std::runtime_error("write to " + spec.output_path + " failed");
    }
    if (!result.message.empty()) std::cerr << result.message;
    return result.exit_code;
  } catch (const ehdiv::cli::UsageError& e) {
    std::cerr << "ehdiv: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ehdiv: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "ehdiv: " << e.what() << "\n";
    return 1;
  }
}
