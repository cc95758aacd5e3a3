#pragma once

#include <cstdint>
#include <limits>

namespace ehdiv {

/// Battery contents and harvested energy, in whole energy units.
using EnergyUnits = std::uint64_t;

enum class ArrivalKind { bernoulli };

/// Per-slot energy arrival process of one transmitter. Arrivals are i.i.d.
/// across users and slots.
struct ArrivalModel {
  ArrivalKind kind = ArrivalKind::bernoulli;
  double p = 0.5;

  static ArrivalModel bernoulli(double p);

  /// Throws std::invalid_argument unless 0 <= p <= 1.
  void validate() const;
};

struct ArrivalMoments {
  double mean = 0.0;
  double variance = 0.0;
};

ArrivalMoments moments(const ArrivalModel& model);

/// Independent sub-streams owned by the same (replication, user) pair.
enum class StreamLane : std::uint32_t {
  arrival = 1,
  contention = 2,
  scheduler = 3,
  oracle = 4,
};

struct StreamId {
  std::uint64_t replication = 0;
  std::uint64_t user = 0;
  StreamLane lane = StreamLane::arrival;
};

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream. Draw i is a keyed hash of (key, i), so a
/// stream is a value: copying it forks an identical sequence and the position
/// can be set directly. The key is derived from (seed, replication, user,
/// lane). Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream() = default;
  RandomStream(std::uint64_t seed, StreamId id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_closed() { return static_cast<double>((operator()() >> 11) + 1) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Number of failures before the first success of Bernoulli(q) trials, or
  /// max() when q <= 0.
  std::uint64_t geometric_failures(double q);

  std::uint64_t position() const { return counter_; }
  void seek(std::uint64_t position) { counter_ = position; }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

EnergyUnits sample_arrival(const ArrivalModel& model, RandomStream& stream);

}  // namespace ehdiv
