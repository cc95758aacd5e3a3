#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ehdiv/analytic.hpp"
#include "ehdiv/arrivals.hpp"
#include "ehdiv/stats.hpp"

using namespace ehdiv;
using namespace ehdiv::stats;

TEST_SUITE("stats") {
  TEST_CASE("empirical counting") {
    const std::vector<std::uint64_t> s{0, 0, 1, 1};
    const auto e = empirical(s);
    CHECK(e.support == std::vector<std::uint64_t>{0, 1});
    CHECK(e.pmf == std::vector<double>{0.5, 0.5});
    CHECK(e.cdf.back() == 1.0);
    CHECK(e.sample_count == 4);
    CHECK(e.mean() == 0.5);

    const std::vector<std::uint64_t> same(7, 3);
    const auto point = empirical(same);
    CHECK(point.pmf == std::vector<double>{1.0});
    CHECK(point.cdf_at(2.9) == 0.0);
    CHECK(point.cdf_at(3) == 1.0);
    CHECK_THROWS_AS(empirical(std::vector<std::uint64_t>{}), std::invalid_argument);

    const std::vector<std::uint64_t> counts{2, 0, 2};
    const auto h = from_histogram(counts);
    CHECK(h.support == std::vector<std::uint64_t>{0, 2});
    CHECK(h.survival_at(1) == 0.5);
  }

  TEST_CASE("empirical bernoulli frequency") {
    RandomStream r(8, {});
    std::vector<std::uint64_t> draws(1'000'000);
    for (auto& d : draws) d = r.bernoulli(0.5);
    const auto e = empirical(draws);
    CHECK(std::abs(e.pmf[1] - 0.5) <= 0.003);
  }

  TEST_CASE("lattice ks distance") {
    const std::vector<std::uint64_t> zeros(10, 0);
    const std::vector<std::uint64_t> ones(10, 1);
    const auto a = empirical(zeros);
    const auto b = empirical(ones);
    CHECK(ks_distance(a, a) == 0.0);
    CHECK(ks_distance(a, b) == 1.0);
    CHECK(ks_distance(b, a) == 1.0);
    CHECK(ks_distance(a, [](double x) { return x >= 1 ? 1.0 : 0.0; }) == 1.0);
    CHECK(ks_distance(a, [](double x) { return x >= 0 ? 1.0 : 0.0; }) == 0.0);

    std::mt19937_64 gen(1);
    std::geometric_distribution<std::uint64_t> geo(0.1);
    std::vector<std::uint64_t> g(1'000'000);
    for (auto& x : g) x = geo(gen) + 1;
    const auto e = empirical(g);
    const double d = ks_distance(e, [](double x) { return x < 1 ? 0.0 : 1 - std::pow(0.9, std::floor(x)); });
    CHECK(d < 0.005);
    CHECK(d >= 0.0);
  }

  TEST_CASE("ks between empirical laws is symmetric and bounded") {
    std::mt19937_64 gen(3);
    std::poisson_distribution<std::uint64_t> p1(3.0), p2(3.5);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::uint64_t> x(500), y(700);
      for (auto& v : x) v = p1(gen);
      for (auto& v : y) v = p2(gen);
      const auto ex = empirical(x);
      const auto ey = empirical(y);
      const double d = ks_distance(ex, ey);
      CHECK(d == ks_distance(ey, ex));
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
      CHECK(ks_distance(ex, ex) == 0.0);
    }
  }

  TEST_CASE("total variation") {
    const std::vector<std::uint64_t> s{0, 1, 1, 2};
    const auto e = empirical(s);
    CHECK(tv_distance(e, [&](std::uint64_t b) { return b < 3 ? e.pmf[b] : 0.0; }) == doctest::Approx(0.0));
    // Reference mass beyond the sample counts toward the distance.
    CHECK(tv_distance(e, [](std::uint64_t b) { return b == 5 ? 1.0 : 0.0; }) == doctest::Approx(1.0));
    CHECK(tv_distance(e, [](std::uint64_t b) { return b == 1 ? 1.0 : 0.0; }) == doctest::Approx(0.5));
  }

  TEST_CASE("continuous ks") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n01;
    std::vector<double> z(200'000);
    for (auto& v : z) v = n01(gen);
    CHECK(ks_distance_continuous(z, normal_cdf) < 0.005);
    for (auto& v : z) v += 1.0;
    CHECK(ks_distance_continuous(z, normal_cdf) > 0.3);
    const std::vector<double> tied(5, 0.0);
    CHECK(ks_distance_continuous(tied, normal_cdf) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_distance_continuous(std::vector<double>{}, normal_cdf), std::invalid_argument);
  }

  TEST_CASE("clt check") {
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs{{1, 1}};
    CHECK_THROWS_AS(clt_check(pairs, 1.0, 0.0), std::invalid_argument);
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> zero_wait{{1, 0}};
    CHECK_THROWS_AS(clt_check(zero_wait, 0.5, 0.5), std::invalid_argument);

    // Exact random sums, no simulator in the loop.
    std::mt19937_64 gen(12);
    std::geometric_distribution<std::uint64_t> wait(1.0 / 1000);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> sums;
    sums.reserve(1'000'000);
    for (int i = 0; i < 1'000'000; ++i) {
      const std::uint64_t k = wait(gen) + 1;
      std::binomial_distribution<std::uint64_t> energy(k, 0.5);
      sums.emplace_back(energy(gen), k);
    }
    const auto r = clt_check(sums, 0.5, 0.5, 0.02);
    CHECK(r.pass);
    CHECK(r.ks_distance < 0.02);
    CHECK(r.sample_count == 1'000'000);
  }

  TEST_CASE("gumbel check on exact gumbel samples") {
    const double users = 1000;
    const auto g = analytic::gumbel_normalizers(users);
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> z(1'000'000);
    // Inverse cdf, then undo the normalizing transform.
    for (auto& v : z) v = g.b + (-std::log(-std::log(u(gen)))) / g.a;
    const auto r = gumbel_check(z, users, 0.005);
    CHECK(r.ks_distance < 0.005);
    CHECK(r.pass);
  }

  TEST_CASE("gumbel check on maxima of exact normals") {
    const int n = 10'000;
    const int reps = 20'000;
    std::mt19937_64 gen(21);
    std::normal_distribution<double> n01;
    std::vector<double> maxima(reps);
    for (auto& m : maxima) {
      m = -1e300;
      for (int i = 0; i < n; ++i) m = std::max(m, n01(gen));
    }
    CHECK(gumbel_check(maxima, n, 0.05).pass);
  }

  TEST_CASE("selection frequency") {
    const std::vector<std::uint64_t> single{1000};
    const auto one = selection_frequency_check(single);
    CHECK(one.value == 0.0);
    CHECK(one.pass);
    const std::vector<std::uint64_t> even(10, 100'000);
    CHECK(selection_frequency_check(even).value == doctest::Approx(0.0));
    CHECK(selection_frequency_check(even).tolerance == doctest::Approx(4 * std::sqrt(0.1 * 0.9 / 1e6)));
    const std::vector<std::uint64_t> skewed{600, 400};
    CHECK_FALSE(selection_frequency_check(skewed).pass);
    CHECK_THROWS_AS(selection_frequency_check(std::vector<std::uint64_t>{0, 0}), std::invalid_argument);
  }

  TEST_CASE("heavy tail report") {
    const std::vector<std::uint64_t> s{0, 1, 2, 3};
    const auto e = empirical(s);
    const std::vector<double> lambdas{0.1, 1.0};
    const std::vector<double> levels{1, 3, 10};
    const auto rows = heavy_tail_report(e, lambdas, levels);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].indicator == doctest::Approx(std::exp(0.1) * 0.5));
    CHECK(rows[1].indicator == 0.0);
    CHECK(rows[2].indicator == 0.0);
    const std::vector<double> up{1, 2, 3};
    const std::vector<double> flat{1, 1, 3};
    CHECK(strictly_increasing(up));
    CHECK_FALSE(strictly_increasing(flat));
  }

  TEST_CASE("batch means and replication summary") {
    const std::vector<double> v{1, 2, 3, 4};
    const auto s = replication_summary(v);
    CHECK(s.mean == 2.5);
    CHECK(s.standard_error == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
    CHECK(replication_summary(std::vector<double>{7}).standard_error == 0.0);
    CHECK_THROWS_AS(replication_summary(std::vector<double>{}), std::invalid_argument);

    std::mt19937_64 gen(2);
    std::normal_distribution<double> n01;
    std::vector<double> iid(100'000);
    for (auto& x : iid) x = n01(gen);
    const auto [mean, se] = batch_means(iid, 50);
    CHECK(std::abs(mean) < 4 * se);
    CHECK(se == doctest::Approx(1.0 / std::sqrt(100'000.0)).epsilon(0.3));
    CHECK_THROWS_AS(batch_means(v, 50), std::invalid_argument);
  }
}
