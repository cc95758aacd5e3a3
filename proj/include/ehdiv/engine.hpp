#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ehdiv/arrivals.hpp"
#include "ehdiv/policies.hpp"
#include "ehdiv/state.hpp"

namespace ehdiv {

struct SlotOutcome {
  /// Effective contenders after empty batteries drop out (distributed), or
  /// the scheduled user (centralized).
  std::vector<std::size_t> contenders;
  std::optional<std::size_t> winner;
  /// Energy spent by the winner: start-of-slot battery plus this slot's
  /// harvest, or the fixed supply level.
  double power = 0.0;
  /// Nats.
  double rate = 0.0;
  /// log(1 + power / N), the normalized-power rate of the same slot.
  double normalized_rate = 0.0;
  bool collided = false;
};

struct StepOptions {
  bool normalize_power_by_n = false;
};

/// Advances `state` by one slot.
///
/// Ordering within a slot:
///   1. the decision was made on the start-of-slot batteries;
///   2. distributed contenders holding no energy drop out; exactly one
///      remaining contender wins, two or more collide; a scheduled user
///      always wins;
///   3. the winner spends its battery plus this slot's arrival and is left
///      empty; every other user stores its arrival;
///   4. rate = log(1 + power) (or log(1 + power / N)), 0 without a winner.
///
/// Throws std::out_of_range for a contender index >= N or an arrival vector
/// of the wrong size, std::overflow_error if a battery would wrap.
SlotOutcome step(SystemState& state, const PolicyDecision& decision, std::span<const EnergyUnits> arrivals,
                 const StepOptions& options = {});

struct RunConfig {
  std::size_t users = 1;
  std::uint64_t horizon = 1'000'000;
  std::uint64_t burn_in = 100'000;
  ArrivalModel arrival = ArrivalModel::bernoulli(0.5);
  bool normalize_power_by_n = false;
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  /// Record per-transmission samples and the battery occupancy histogram.
  /// Throughput and counters are always recorded.
  bool collect_samples = true;
  /// Record the slot maximum every k measured slots (0 = off).
  std::uint64_t maxima_every = 0;

  /// Default burn-in: a tenth of the horizon.
  static std::uint64_t default_burn_in(std::uint64_t horizon) { return horizon / 10; }

  /// Throws std::invalid_argument unless N >= 1 and burn_in < horizon.
  void validate() const;
};

/// Slot maximum of available energy (battery plus this slot's arrival).
struct MaximumSample {
  double max_energy = 0.0;
  /// (M - mu N) / (sigma sqrt(N)): the waiting time replaced by its mean N.
  double shared_standardized = 0.0;
  /// max_n (A_n - mu S_n) / (sigma sqrt(S_n)), S_n = slots since user n last
  /// transmitted.
  double per_user_standardized = 0.0;
};

struct RunMetrics {
  std::size_t users = 0;
  bool normalized = false;
  std::uint64_t window_slots = 0;
  double rate_sum = 0.0;
  double normalized_rate_sum = 0.0;
  double power_sum = 0.0;
  std::uint64_t transmissions = 0;
  std::uint64_t collisions = 0;
  std::vector<std::uint64_t> selection_counts;
  /// Start-of-slot battery occupancy: entry b counts (user, slot) pairs with
  /// battery b over the measurement window.
  std::vector<std::uint64_t> battery_histogram;
  /// Energy spent per measured transmission, in time order.
  std::vector<EnergyUnits> power_samples;
  /// Slots since the transmitter's previous transmission.
  std::vector<std::uint64_t> waiting_times;
  /// (energy spent, waiting time) for transmissions with a known predecessor.
  std::vector<std::pair<EnergyUnits, std::uint64_t>> clt_pairs;
  std::vector<MaximumSample> maxima;

  /// Configured throughput: normalized iff the run normalized power by N.
  double avg_throughput() const { return normalized ? avg_normalized_throughput() : avg_raw_throughput(); }
  double avg_raw_throughput() const;
  double avg_normalized_throughput() const;
  double mean_power() const;
  double mean_waiting_time() const;

  /// Concatenates samples and sums counters; both sides must share N.
  void merge(const RunMetrics& other);
};

/// Runs `horizon` slots from empty batteries; metrics cover slots
/// burn_in + 1 .. horizon. Deterministic in (config, spec).
RunMetrics run(const RunConfig& config, const PolicySpec& spec);

}  // namespace ehdiv
