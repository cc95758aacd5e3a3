#include "ehdiv/experiment.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ehdiv/analytic.hpp"
#include "ehdiv/engine.hpp"
#include "ehdiv/parallel.hpp"
#include "ehdiv/stats.hpp"
#include "ehdiv/validation.hpp"

namespace ehdiv::cli {
namespace {

using csv::format;

RunConfig base_config(const ExperimentSpec& spec, std::size_t users, std::uint64_t replication) {
  RunConfig c;
  c.users = users;
  c.horizon = spec.horizon;
  c.burn_in = spec.effective_burn_in();
  c.arrival = ArrivalModel::bernoulli(spec.p);
  c.seed = spec.seed;
  c.replication = replication;
  return c;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

Command parse_command(std::string_view text) {
  if (text == "simulate") return Command::simulate;
  if (text == "sweep") return Command::sweep;
  if (text == "normalized-sweep" || text == "normalized_sweep") return Command::normalized_sweep;
  if (text == "analytic") return Command::analytic;
  if (text == "validate") return Command::validate;
  if (text == "fig2") return Command::fig2;
  throw UsageError("unknown command '" + std::string(text) + "'");
}

std::string command_name(Command command) {
  switch (command) {
    case Command::simulate:
      return "simulate";
    case Command::sweep:
      return "sweep";
    case Command::normalized_sweep:
      return "normalized-sweep";
    case Command::analytic:
      return "analytic";
    case Command::validate:
      return "validate";
    case Command::fig2:
      return "fig2";
  }
  return "?";
}

std::vector<PolicySpec> default_sweep_schemes() {
  return {PolicySpec::greedy(),       PolicySpec::tdma(),         PolicySpec::aloha(1.0),
          PolicySpec::energy_aware(), PolicySpec::fixed_power(), PolicySpec::p2p_greedy()};
}

ExperimentSpec ExperimentSpec::defaults(Command command) {
  ExperimentSpec s;
  s.command = command;
  switch (command) {
    case Command::simulate:
      s.n_list = {10};
      s.schemes = {PolicySpec::greedy()};
      s.replications = 1;
      break;
    case Command::sweep:
    case Command::normalized_sweep:
      s.schemes = default_sweep_schemes();
      break;
    case Command::fig2:
      s.n_list = {1001};
      break;
    case Command::analytic:
    case Command::validate:
      break;
  }
  return s;
}

std::uint64_t ExperimentSpec::effective_burn_in() const {
  return burn_in ? *burn_in : RunConfig::default_burn_in(horizon);
}

void ExperimentSpec::validate() const {
  if (n_list.empty()) throw UsageError("the N list is empty");
  for (const auto n : n_list) {
    if (n == 0) throw UsageError("N must be at least 1");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p must lie in [0, 1]");
  if (replications == 0) throw UsageError("replications must be at least 1");
  if (horizon == 0) throw UsageError("horizon must be positive");
  if (effective_burn_in() >= horizon) throw UsageError("burn-in must be shorter than the horizon");
  if (!(scale > 0.0 && std::isfinite(scale))) throw UsageError("scale must be positive");
  switch (command) {
    case Command::simulate:
      if (n_list.size() != 1) throw UsageError("simulate takes a single N");
      if (schemes.size() != 1) throw UsageError("simulate takes a single scheme");
      break;
    case Command::sweep:
    case Command::normalized_sweep:
      if (n_list.size() < 2) throw UsageError("a sweep needs at least two values of N");
      if (schemes.empty()) throw UsageError("a sweep needs at least one scheme");
      break;
    case Command::analytic:
    case Command::validate:
    case Command::fig2:
      break;
  }
  for (const auto& s : schemes) {
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (command == Command::simulate && s.benchmark() && n_list.front() != 1) {
      throw UsageError("benchmark schemes run with N = 1");
    }
  }
}

CommandResult cmd_simulate(const ExperimentSpec& spec) {
  spec.validate();
  const PolicySpec& scheme = spec.schemes.front();
  const std::size_t users = spec.n_list.front();

  std::vector<RunMetrics> runs(spec.replications);
  parallel_for(runs.size(), spec.jobs, [&](std::size_t r) {
    RunConfig c = base_config(spec, users, r);
    c.collect_samples = true;
    runs[r] = run(c, scheme);
  });

  CommandResult out;
  out.table.header = {"scheme", "N", "p", "seed", "replication", "avg_throughput_nats", "mean_battery",
                      "mean_waiting_time"};
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const RunMetrics& m = runs[r];
    out.table.add_row({scheme.name(), format(std::uint64_t{users}), format(spec.p), format(spec.seed),
                       format(std::uint64_t{r}), format(m.avg_raw_throughput()), format(m.mean_power()),
                       m.waiting_times.empty() ? std::string() : format(m.mean_waiting_time())});
  }
  return out;
}

CommandResult cmd_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const bool normalized = spec.command == Command::normalized_sweep;
  struct Job {
    std::size_t scheme;
    std::size_t users;
    std::uint64_t replication;
  };
  // Benchmarks are single-link schemes: one set of runs at N = 1 serves every
  // row.
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
    const bool single = spec.schemes[s].benchmark();
    for (std::size_t i = 0; i < (single ? 1 : spec.n_list.size()); ++i) {
      for (std::uint64_t r = 0; r < spec.replications; ++r) {
        jobs.push_back({s, single ? std::size_t{1} : spec.n_list[i], r});
      }
    }
  }
  std::vector<double> values(jobs.size());
  parallel_for(jobs.size(), spec.jobs, [&](std::size_t j) {
    RunConfig c = base_config(spec, jobs[j].users, jobs[j].replication);
    c.normalize_power_by_n = normalized;
    c.collect_samples = false;
    values[j] = run(c, spec.schemes[jobs[j].scheme]).avg_throughput();
  });

  const ArrivalMoments mom = moments(ArrivalModel::bernoulli(spec.p));
  const double sigma = std::sqrt(mom.variance);

  CommandResult out;
  out.table.header = {"scheme",           "N",
                      "p",                "normalized",
                      "replications",     "throughput_mean",
                      "throughput_se",    "greedy_upper_bound",
                      "log1p_mu_n",       "aloha_optimum",
                      "energy_aware_prediction", "fixed_power_benchmark",
                      "p2p_benchmark"};
  std::size_t offset = 0;
  for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
    const bool single = spec.schemes[s].benchmark();
    const std::size_t points = single ? 1 : spec.n_list.size();
    for (std::size_t i = 0; i < spec.n_list.size(); ++i) {
      const std::size_t block = offset + (single ? 0 : i) * spec.replications;
      const stats::MeanAndError summary = stats::replication_summary(
          std::span<const double>(values).subspan(block, spec.replications));
      const auto n = static_cast<double>(spec.n_list[i]);

      double upper = stats::kNaN;
      double aloha = stats::kNaN;
      double energy_aware = stats::kNaN;
      if (n >= 2.0) {
        upper = analytic::throughput_upper_greedy(n, mom.mean, sigma).upper;
        if (spec.p > 0.0) {
          const auto fp = analytic::energy_aware_fixed_point(n, spec.p);
          energy_aware = fp.predicted_throughput;
        }
      }
      if (n >= 3.0 && spec.p * std::numbers::e * n > 1.0) aloha = analytic::aloha_optimal(n, spec.p).throughput;
      out.table.add_row({spec.schemes[s].name(), format(std::uint64_t{spec.n_list[i]}), format(spec.p),
                         format_bool(normalized), format(spec.replications), format(summary.mean),
                         format(summary.standard_error), format(upper), format(std::log1p(mom.mean * n)),
                         format(aloha), format(energy_aware), format(std::log1p(mom.mean)),
                         format(spec.p * std::numbers::ln2)});
    }
    offset += points * spec.replications;
  }
  return out;
}

CommandResult cmd_analytic(const ExperimentSpec& spec) {
  spec.validate();
  const ArrivalMoments mom = moments(ArrivalModel::bernoulli(spec.p));
  const double sigma = std::sqrt(mom.variance);
  CommandResult out;
  out.table.header = {"N",
                      "p",
                      "mean_battery",
                      "expected_sqrt_wait",
                      "max_lower",
                      "max_upper",
                      "greedy_upper_bound",
                      "log1p_mu_n",
                      "gumbel_a",
                      "gumbel_b",
                      "aloha_success",
                      "aloha_throughput_exact",
                      "aloha_throughput_asymptotic",
                      "aloha_optimum",
                      "energy_aware_epsilon",
                      "energy_aware_q",
                      "energy_aware_success",
                      "energy_aware_prediction",
                      "energy_aware_converged"};
  for (const std::size_t users : spec.n_list) {
    const auto n = static_cast<double>(users);
    const auto bounds = analytic::expected_max_bounds(n, mom.mean, sigma);
    std::vector<std::string> row{format(std::uint64_t{users}),
                                 format(spec.p),
                                 format(n * mom.mean),
                                 format(analytic::expected_sqrt_geometric(n)),
                                 format(bounds.lower),
                                 format(bounds.upper),
                                 format(std::log1p(bounds.upper)),
                                 format(std::log1p(bounds.lower))};
    if (users >= 2) {
      const auto g = analytic::gumbel_normalizers(n);
      row.push_back(format(g.a));
      row.push_back(format(g.b));
    } else {
      row.insert(row.end(), 2, std::string());
    }
    if (spec.p > 0.0) {
      const auto d = analytic::distributed_throughput(n, spec.p, 1.0 / n);
      row.push_back(format(d.success));
      row.push_back(format(d.exact));
      row.push_back(format(d.asymptotic));
    } else {
      row.insert(row.end(), 3, std::string());
    }
    row.push_back(users >= 3 && spec.p * std::numbers::e * n > 1.0
                      ? format(analytic::aloha_optimal(n, spec.p).throughput)
                      : std::string());
    if (users >= 2 && spec.p > 0.0) {
      const auto fp = analytic::energy_aware_fixed_point(n, spec.p);
      row.push_back(format(fp.epsilon));
      row.push_back(format(fp.q));
      row.push_back(format(fp.success));
      row.push_back(format(fp.predicted_throughput));
      row.push_back(format_bool(fp.converged));
    } else {
      row.insert(row.end(), 5, std::string());
    }
    out.table.add_row(std::move(row));
  }
  return out;
}

CommandResult cmd_validate(const ExperimentSpec& spec) {
  spec.validate();
  validation::Options options;
  options.seed = spec.seed;
  options.scale = spec.scale;
  options.jobs = spec.jobs;
  const auto rows = validation::run_all(options);
  CommandResult out;
  out.table = validation::to_table(rows);
  for (const auto& r : rows) {
    if (!r.report.pass) out.message += "FAIL criterion " + std::to_string(r.criterion) + " " + r.gate + "\n";
  }
  out.exit_code = validation::all_pass(rows) ? 0 : 1;
  return out;
}

CommandResult cmd_fig2(const ExperimentSpec& spec) {
  spec.validate();
  const auto n = static_cast<double>(spec.n_list.front());
  if (n * 0.001 <= 1.0) throw UsageError("fig2 needs N > 1000 so that x N > 1 on the whole grid");
  CommandResult out;
  out.table.header = {"x", "f1", "f2", "f2_minus_f1"};
  for (int k = 1; k <= 1000; ++k) {
    const double x = k / 1000.0;
    const auto f = analytic::f1_f2(x, n);
    out.table.add_row({format(x), format(f.f1), format(f.f2), format(f.f2 - f.f1)});
  }
  return out;
}

CommandResult dispatch(const ExperimentSpec& spec) {
  switch (spec.command) {
    case Command::simulate:
      return cmd_simulate(spec);
    case Command::sweep:
    case Command::normalized_sweep:
      return cmd_sweep(spec);
    case Command::analytic:
      return cmd_analytic(spec);
    case Command::validate:
      return cmd_validate(spec);
    case Command::fig2:
      return cmd_fig2(spec);
  }
  throw UsageError("unknown command");
}

}  // namespace ehdiv::cli
