#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ehdiv/arrivals.hpp"
#include "ehdiv/state.hpp"

namespace ehdiv {

enum class PolicyKind {
  greedy,            ///< central controller serves the fullest battery
  tdma,              ///< fixed round robin
  aloha,             ///< contend with probability N^-alpha
  energy_aware,      ///< contend with probability 1/N once battery >= p e ln N
  fixed_power,       ///< benchmark: constant supply, N = 1
  p2p_greedy,        ///< benchmark: single harvesting link, full battery every slot
  fixed_contention,  ///< contend with an externally fixed probability q
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::greedy;
  double alpha = 1.0;
  /// fixed_power level; defaults to the mean arrival rate.
  std::optional<double> level;
  /// fixed_contention probability.
  double q = 0.0;

  static PolicySpec of(PolicyKind kind) {
    PolicySpec s;
    s.kind = kind;
    return s;
  }
  static PolicySpec greedy() { return of(PolicyKind::greedy); }
  static PolicySpec tdma() { return of(PolicyKind::tdma); }
  static PolicySpec aloha(double alpha);
  static PolicySpec energy_aware() { return of(PolicyKind::energy_aware); }
  static PolicySpec fixed_power(std::optional<double> level = std::nullopt);
  static PolicySpec p2p_greedy() { return of(PolicyKind::p2p_greedy); }
  static PolicySpec fixed_contention(double q);

  /// Accepts `greedy`, `tdma`, `aloha`, `aloha:<alpha>`, `energy_aware`,
  /// `fixed_power`, `fixed_power:<level>`, `p2p_greedy`, `contention:<q>`.
  /// Throws std::invalid_argument on anything else.
  static PolicySpec parse(std::string_view text);

  /// Inverse of parse; stable, used as the CSV scheme label.
  std::string name() const;

  void validate() const;
  bool centralized() const;
  /// Benchmarks always run a single link.
  bool benchmark() const { return kind == PolicyKind::fixed_power || kind == PolicyKind::p2p_greedy; }

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// Users that attempt the channel in one slot. Centralized policies emit a
/// single scheduled user.
struct PolicyDecision {
  std::vector<std::size_t> contenders;
  bool scheduled = false;
  /// Set by the fixed-supply benchmark: transmit at this power, battery unused.
  std::optional<double> fixed_power;

  void clear() {
    contenders.clear();
    scheduled = false;
    fixed_power.reset();
  }
};

/// Index of a fullest battery, ties broken uniformly at random.
std::size_t greedy_select(std::span<const EnergyUnits> batteries, RandomStream& stream);

/// 0-based round robin: user (slot - 1) mod N for 1-based slots.
std::size_t tdma_select(std::uint64_t slot, std::size_t users);

/// Minimum start-of-slot battery for energy-aware contention, p e ln N.
double energy_aware_threshold(std::size_t users, double p);

/// Per-user contention process. Each slot the user attempts with probability
/// q, independently of everything else. Implemented by geometric skip-ahead
/// on the user's own stream, so one draw is spent per attempt instead of per
/// slot.
class ContentionClock {
 public:
  ContentionClock() = default;
  ContentionClock(RandomStream stream, double q, std::uint64_t first_slot);

  /// True iff the user attempts in `slot`. Slots must be queried in
  /// increasing order, every slot.
  bool fires(std::uint64_t slot) {
    if (slot != next_) return false;
    advance();
    return true;
  }

  std::uint64_t next_attempt() const { return next_; }

 private:
  void advance();

  RandomStream stream_;
  double q_ = 0.0;
  std::uint64_t next_ = 0;
};

/// Users that attempt this slot under uniform contention probability
/// N^-alpha.
void aloha_decide(std::uint64_t slot, std::span<ContentionClock> clocks, PolicyDecision& out);

/// Users whose battery clears the threshold and whose 1/N coin fires.
void energy_aware_decide(std::uint64_t slot, std::span<const EnergyUnits> batteries, double threshold,
                         std::span<ContentionClock> clocks, PolicyDecision& out);

/// Single-link benchmarks. Throws std::invalid_argument for a negative
/// fixed-power level or a non-benchmark spec.
PolicyDecision benchmark_decide(const PolicySpec& spec, const ArrivalModel& arrival);

/// Stateful decision maker for one replication.
class Policy {
 public:
  Policy(PolicySpec spec, std::size_t users, const ArrivalModel& arrival, std::uint64_t seed,
         std::uint64_t replication);

  void decide(const SystemState& state, PolicyDecision& out);

  const PolicySpec& spec() const { return spec_; }
  /// Per-slot attempt probability of each user (contention policies only).
  double attempt_probability() const { return attempt_q_; }

 private:
  PolicySpec spec_;
  std::size_t users_;
  ArrivalModel arrival_;
  RandomStream scheduler_;
  std::vector<ContentionClock> clocks_;
  double attempt_q_ = 0.0;
  double threshold_ = 0.0;
};

}  // namespace ehdiv
