#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ehdiv/csv.hpp"
#include "ehdiv/experiment.hpp"
#include "ehdiv/parallel.hpp"

using namespace ehdiv;
using namespace ehdiv::cli;

TEST_SUITE("cli") {
  TEST_CASE("csv number formatting") {
    CHECK(csv::format(0.0) == "0");
    CHECK(csv::format(std::log(2.0)) == "0.69314718056");
    CHECK(csv::format(std::nan("")).empty());
    CHECK(csv::format(std::uint64_t{18446744073709551615ULL}) == "18446744073709551615");
  }

  TEST_CASE("csv quoting and round trip") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    csv::Table t;
    t.header = {"name", "value"};
    t.add_row({"x, y", "1"});
    t.add_row({"quote \"q\"", ""});
    t.add_row({"multi\nline", "2"});
    const auto back = csv::parse(t.str());
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(t.column("value") == 1);
    CHECK_THROWS_AS(t.column("missing"), std::out_of_range);
    CHECK_THROWS_AS(t.add_row({"only one"}), std::invalid_argument);
  }

  TEST_CASE("commands parse") {
    CHECK(parse_command("normalized-sweep") == Command::normalized_sweep);
    CHECK(parse_command("normalized_sweep") == Command::normalized_sweep);
    for (const auto c : {Command::simulate, Command::sweep, Command::normalized_sweep, Command::analytic,
                         Command::validate, Command::fig2}) {
      CHECK(parse_command(command_name(c)) == c);
    }
    CHECK_THROWS_AS(parse_command("plot"), UsageError);
  }

  TEST_CASE("spec validation") {
    auto s = ExperimentSpec::defaults(Command::simulate);
    CHECK_NOTHROW(s.validate());
    CHECK(s.effective_burn_in() == 100'000);
    s.n_list = {10, 20};
    CHECK_THROWS_AS(s.validate(), UsageError);
    s = ExperimentSpec::defaults(Command::simulate);
    s.burn_in = s.horizon;
    CHECK_THROWS_AS(s.validate(), UsageError);
    s = ExperimentSpec::defaults(Command::simulate);
    s.schemes = {PolicySpec::p2p_greedy()};
    CHECK_THROWS_AS(s.validate(), UsageError);
    s = ExperimentSpec::defaults(Command::sweep);
    s.n_list = {10};
    CHECK_THROWS_AS(s.validate(), UsageError);
    s = ExperimentSpec::defaults(Command::sweep);
    s.replications = 0;
    CHECK_THROWS_AS(s.validate(), UsageError);
    s = ExperimentSpec::defaults(Command::sweep);
    s.n_list.clear();
    CHECK_THROWS_AS(s.validate(), UsageError);
    s = ExperimentSpec::defaults(Command::sweep);
    s.p = 2;
    CHECK_THROWS_AS(s.validate(), UsageError);
  }

  TEST_CASE("simulate: energy per transmission N p under greedy and tdma") {
    auto s = ExperimentSpec::defaults(Command::simulate);
    for (const auto& scheme : {PolicySpec::greedy(), PolicySpec::tdma()}) {
      s.schemes = {scheme};
      const auto r = cmd_simulate(s);
      REQUIRE(r.table.rows.size() == 1);
      const double battery = std::stod(r.table.rows[0][r.table.column("mean_battery")]);
      CHECK(std::abs(battery - 5.0) / 5.0 < 0.02);
    }
  }

  TEST_CASE("simulate: fixed supply gives log(1 + mu) exactly") {
    auto s = ExperimentSpec::defaults(Command::simulate);
    s.n_list = {1};
    s.horizon = 10'000;
    s.schemes = {PolicySpec::fixed_power()};
    s.replications = 3;
    const auto r = cmd_simulate(s);
    REQUIRE(r.table.rows.size() == 3);
    for (const auto& row : r.table.rows) {
      CHECK(row[r.table.column("avg_throughput_nats")] == csv::format(std::log1p(0.5)));
    }
  }

  TEST_CASE("sweep: shape, overlays, determinism, job independence") {
    auto s = ExperimentSpec::defaults(Command::sweep);
    s.n_list = {2, 5};
    s.horizon = 5'000;
    s.replications = 3;
    const auto a = cmd_sweep(s);
    CHECK(a.table.rows.size() == s.schemes.size() * 2);
    CHECK(a.table.header[5] == "throughput_mean");
    s.jobs = 3;
    const auto b = cmd_sweep(s);
    CHECK(a.table.str() == b.table.str());

    const auto& row = a.table.rows[0];
    CHECK(row[0] == "greedy");
    CHECK(row[a.table.column("fixed_power_benchmark")] == csv::format(std::log1p(0.5)));
    CHECK(row[a.table.column("aloha_optimum")].empty());  // N = 2 is outside the formula's range

    s.command = Command::normalized_sweep;
    const auto n = cmd_sweep(s);
    CHECK(n.table.rows[0][n.table.column("normalized")] == "true");
    CHECK(n.table.str() != a.table.str());
  }

  TEST_CASE("analytic table") {
    auto s = ExperimentSpec::defaults(Command::analytic);
    s.n_list = {1, 100};
    const auto r = cmd_analytic(s);
    REQUIRE(r.table.rows.size() == 2);
    CHECK(r.table.rows[0][r.table.column("gumbel_a")].empty());
    CHECK(std::stod(r.table.rows[1][r.table.column("aloha_optimum")]) == doctest::Approx(1.8071).epsilon(1e-4));
    CHECK(r.table.rows[1][r.table.column("energy_aware_converged")] == "true");
  }

  TEST_CASE("fig2 grid") {
    const auto r = cmd_fig2(ExperimentSpec::defaults(Command::fig2));
    REQUIRE(r.table.rows.size() == 1000);
    CHECK(r.table.rows.front()[0] == "0.001");
    CHECK(r.table.rows.back()[0] == "1");
    CHECK(r.table.rows.back()[3] == "0");
    CHECK(std::stod(r.table.rows[499][2]) == doctest::Approx(12.431).epsilon(1e-4));
    auto small = ExperimentSpec::defaults(Command::fig2);
    small.n_list = {500};
    CHECK_THROWS_AS(cmd_fig2(small), UsageError);
  }

  TEST_CASE("parallel_for visits every index once and propagates errors") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (const int h : hits) CHECK(h == 1);
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
    CHECK_THROWS_AS(parallel_for(100, 3,
                                 [](std::size_t i) {
                                   if (i == 42) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
  }
}
