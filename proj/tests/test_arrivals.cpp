#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "ehdiv/arrivals.hpp"

using namespace ehdiv;

TEST_SUITE("arrivals") {
  TEST_CASE("degenerate probabilities are deterministic") {
    RandomStream s(7, {0, 0, StreamLane::arrival});
    for (int i = 0; i < 1000; ++i) {
      CHECK(sample_arrival(ArrivalModel::bernoulli(0.0), s) == 0);
      CHECK(sample_arrival(ArrivalModel::bernoulli(1.0), s) == 1);
    }
  }

  TEST_CASE("bernoulli sample mean within 6 sigma") {
    RandomStream s(11, {3, 4, StreamLane::arrival});
    const auto model = ArrivalModel::bernoulli(0.5);
    const int k = 1'000'000;
    std::uint64_t sum = 0;
    for (int i = 0; i < k; ++i) sum += sample_arrival(model, s);
    const double mean = static_cast<double>(sum) / k;
    CHECK(mean >= 0.498);
    CHECK(mean <= 0.502);
  }

  TEST_CASE("other probabilities converge at the binomial rate") {
    for (const double p : {0.01, 0.3, 0.9}) {
      RandomStream s(5, {0, 1, StreamLane::arrival});
      const int k = 1'000'000;
      std::uint64_t sum = 0;
      for (int i = 0; i < k; ++i) sum += sample_arrival(ArrivalModel::bernoulli(p), s);
      CHECK(std::abs(static_cast<double>(sum) / k - p) <= 6.0 * std::sqrt(p * (1 - p) / k));
    }
  }

  TEST_CASE("moments") {
    const auto m = moments(ArrivalModel::bernoulli(0.5));
    CHECK(m.mean == 0.5);
    CHECK(m.variance == 0.25);
    CHECK(moments(ArrivalModel::bernoulli(0.0)).variance == 0.0);
    const auto one = moments(ArrivalModel::bernoulli(1.0));
    CHECK(one.mean == 1.0);
    CHECK(one.variance == 0.0);
  }

  TEST_CASE("invalid probabilities are rejected") {
    CHECK_THROWS_AS(ArrivalModel::bernoulli(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(ArrivalModel::bernoulli(1.5), std::invalid_argument);
    CHECK_THROWS_AS(ArrivalModel::bernoulli(std::nan("")), std::invalid_argument);
  }

  TEST_CASE("equal stream ids reproduce the sequence bit for bit") {
    RandomStream a(42, {2, 9, StreamLane::arrival});
    RandomStream b(42, {2, 9, StreamLane::arrival});
    for (int i = 0; i < 10000; ++i) REQUIRE(a() == b());

    // A copy forks the same future; seek rewinds.
    RandomStream c = a;
    const auto x = a();
    CHECK(c() == x);
    c.seek(0);
    RandomStream d(42, {2, 9, StreamLane::arrival});
    CHECK(c() == d());
  }

  TEST_CASE("distinct stream ids give distinct, uncorrelated sequences") {
    const StreamId ids[] = {{0, 0, StreamLane::arrival},  {0, 1, StreamLane::arrival},
                            {1, 0, StreamLane::arrival},  {0, 0, StreamLane::contention},
                            {0, 0, StreamLane::scheduler}};
    std::set<std::uint64_t> firsts;
    for (const auto& id : ids) firsts.insert(RandomStream(1, id)());
    firsts.insert(RandomStream(2, ids[0])());
    CHECK(firsts.size() == 6);

    // Sample correlation of paired uniforms ~ N(0, 1/k).
    RandomStream a(1, ids[0]);
    RandomStream b(1, ids[1]);
    const int k = 200'000;
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < k; ++i) {
      const double x = a.uniform();
      const double y = b.uniform();
      sx += x;
      sy += y;
      sxy += x * y;
      sxx += x * x;
      syy += y * y;
    }
    const double cov = sxy / k - sx / k * sy / k;
    const double corr = cov / std::sqrt((sxx / k - sx / k * sx / k) * (syy / k - sy / k * sy / k));
    CHECK(std::abs(corr) < 6.0 / std::sqrt(k));
  }

  TEST_CASE("below is uniform and rejects zero") {
    RandomStream s(3, {});
    CHECK_THROWS_AS(s.below(0), std::invalid_argument);
    int counts[3] = {0, 0, 0};
    const int k = 300'000;
    for (int i = 0; i < k; ++i) ++counts[s.below(3)];
    for (const int c : counts) CHECK(std::abs(c / double(k) - 1.0 / 3) < 6 * std::sqrt(2.0 / 9 / k));
  }

  TEST_CASE("geometric failures") {
    RandomStream s(4, {});
    CHECK(s.geometric_failures(1.0) == 0);
    CHECK(s.geometric_failures(0.0) == RandomStream::max());
    const double q = 0.2;
    const int k = 200'000;
    double sum = 0;
    for (int i = 0; i < k; ++i) sum += static_cast<double>(s.geometric_failures(q));
    const double mean = (1 - q) / q;
    const double sd = std::sqrt(1 - q) / q;
    CHECK(std::abs(sum / k - mean) < 6 * sd / std::sqrt(k));
  }
}
