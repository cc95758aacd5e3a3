#include "ehdiv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ehdiv {
namespace {

void resolve(SystemState& state, const PolicyDecision& decision, std::span<const EnergyUnits> arrivals,
             const StepOptions& options, SlotOutcome& out) {
  const std::size_t users = state.users();
  if (arrivals.size() != users) {
    throw std::out_of_range("step: expected " + std::to_string(users) + " arrivals, got " +
                            std::to_string(arrivals.size()));
  }
  out.contenders.clear();
  out.winner.reset();
  out.power = 0.0;
  out.rate = 0.0;
  out.normalized_rate = 0.0;
  out.collided = false;

  for (const std::size_t n : decision.contenders) {
    if (n >= users) {
      throw std::out_of_range("step: contender " + std::to_string(n) + " out of range for N = " +
                              std::to_string(users));
    }
    if (decision.scheduled || state.batteries[n] > 0) out.contenders.push_back(n);
  }

  const double n_users = static_cast<double>(users);
  if (decision.fixed_power) {
    out.winner = out.contenders.empty() ? 0 : out.contenders.front();
    out.power = *decision.fixed_power;
    out.rate = std::log1p(out.power);
    out.normalized_rate = std::log1p(out.power / n_users);
    if (options.normalize_power_by_n) out.rate = out.normalized_rate;
    state.last_tx_slot[*out.winner] = state.slot;
    ++state.slot;
    return;
  }

  if (decision.scheduled) {
    if (out.contenders.size() != 1) throw std::out_of_range("step: a schedule names exactly one user");
    out.winner = out.contenders.front();
  } else if (out.contenders.size() == 1) {
    out.winner = out.contenders.front();
  } else if (out.contenders.size() >= 2) {
    out.collided = true;
  }

  constexpr EnergyUnits kMax = std::numeric_limits<EnergyUnits>::max();
  for (std::size_t n = 0; n < users; ++n) {
    if (state.batteries[n] > kMax - arrivals[n]) throw std::overflow_error("battery overflow");
    state.batteries[n] += arrivals[n];
  }
  if (out.winner) {
    const std::size_t w = *out.winner;
    const auto energy = static_cast<double>(state.batteries[w]);
    state.batteries[w] = 0;
    state.last_tx_slot[w] = state.slot;
    out.power = energy;
    out.rate = std::log1p(energy);
    out.normalized_rate = std::log1p(energy / n_users);
    if (options.normalize_power_by_n) out.rate = out.normalized_rate;
  }
  ++state.slot;
}

}  // namespace

SlotOutcome step(SystemState& state, const PolicyDecision& decision, std::span<const EnergyUnits> arrivals,
                 const StepOptions& options) {
  SlotOutcome out;
  resolve(state, decision, arrivals, options, out);
  return out;
}

void RunConfig::validate() const {
  if (users == 0) throw std::invalid_argument("run needs N >= 1");
  if (burn_in >= horizon) throw std::invalid_argument("burn-in must be shorter than the horizon");
  arrival.validate();
}

double RunMetrics::avg_raw_throughput() const {
  return window_slots == 0 ? 0.0 : rate_sum / static_cast<double>(window_slots);
}

double RunMetrics::avg_normalized_throughput() const {
  return window_slots == 0 ? 0.0 : normalized_rate_sum / static_cast<double>(window_slots);
}

double RunMetrics::mean_power() const {
  return transmissions == 0 ? 0.0 : power_sum / static_cast<double>(transmissions);
}

double RunMetrics::mean_waiting_time() const {
  if (waiting_times.empty()) return 0.0;
  double s = 0.0;
  for (const auto w : waiting_times) s += static_cast<double>(w);
  return s / static_cast<double>(waiting_times.size());
}

void RunMetrics::merge(const RunMetrics& other) {
  if (users != other.users) throw std::invalid_argument("merge: metrics for different N");
  window_slots += other.window_slots;
  rate_sum += other.rate_sum;
  normalized_rate_sum += other.normalized_rate_sum;
  power_sum += other.power_sum;
  transmissions += other.transmissions;
  collisions += other.collisions;
  if (selection_counts.size() < other.selection_counts.size()) selection_counts.resize(other.selection_counts.size());
  for (std::size_t i = 0; i < other.selection_counts.size(); ++i) selection_counts[i] += other.selection_counts[i];
  if (battery_histogram.size() < other.battery_histogram.size()) {
    battery_histogram.resize(other.battery_histogram.size());
  }
  for (std::size_t i = 0; i < other.battery_histogram.size(); ++i) battery_histogram[i] += other.battery_histogram[i];
  power_samples.insert(power_samples.end(), other.power_samples.begin(), other.power_samples.end());
  waiting_times.insert(waiting_times.end(), other.waiting_times.begin(), other.waiting_times.end());
  clt_pairs.insert(clt_pairs.end(), other.clt_pairs.begin(), other.clt_pairs.end());
  maxima.insert(maxima.end(), other.maxima.begin(), other.maxima.end());
}

RunMetrics run(const RunConfig& config, const PolicySpec& spec) {
  config.validate();
  spec.validate();
  const std::size_t users = config.users;
  const double p = config.arrival.p;

  Policy policy(spec, users, config.arrival, config.seed, config.replication);
  std::vector<RandomStream> arrival_streams;
  arrival_streams.reserve(users);
  for (std::size_t n = 0; n < users; ++n) {
    arrival_streams.emplace_back(config.seed, StreamId{config.replication, n, StreamLane::arrival});
  }

  RunMetrics m;
  m.users = users;
  m.normalized = config.normalize_power_by_n;
  m.selection_counts.assign(users, 0);
  if (config.collect_samples) {
    const std::uint64_t window = config.horizon - config.burn_in;
    m.power_samples.reserve(std::min<std::uint64_t>(window, 1u << 24));
  }

  const ArrivalMoments mom = moments(config.arrival);
  const double sigma = std::sqrt(mom.variance);
  const double n_users = static_cast<double>(users);

  SystemState state(users);
  PolicyDecision decision;
  SlotOutcome outcome;
  std::vector<EnergyUnits> arrivals(users, 0);
  std::vector<std::uint64_t> last_tx(users, 0);
  const StepOptions options{config.normalize_power_by_n};
  const bool harvests = spec.kind != PolicyKind::fixed_power;

  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    policy.decide(state, decision);
    if (harvests) {
      for (std::size_t n = 0; n < users; ++n) arrivals[n] = arrival_streams[n].bernoulli(p) ? 1 : 0;
    }
    const bool measured = t > config.burn_in;

    if (measured && config.collect_samples) {
      for (const EnergyUnits b : state.batteries) {
        if (b >= m.battery_histogram.size()) m.battery_histogram.resize(b + 1, 0);
        ++m.battery_histogram[b];
      }
    }
    if (measured && config.maxima_every > 0 && (t - config.burn_in) % config.maxima_every == 0 && sigma > 0) {
      MaximumSample s;
      s.per_user_standardized = -std::numeric_limits<double>::infinity();
      for (std::size_t n = 0; n < users; ++n) {
        const auto avail = static_cast<double>(state.batteries[n] + arrivals[n]);
        const auto since = static_cast<double>(t - state.last_tx_slot[n]);
        s.max_energy = std::max(s.max_energy, avail);
        s.per_user_standardized = std::max(s.per_user_standardized, (avail - p * since) / (sigma * std::sqrt(since)));
      }
      s.shared_standardized = (s.max_energy - p * n_users) / (sigma * std::sqrt(n_users));
      m.maxima.push_back(s);
    }

    resolve(state, decision, arrivals, options, outcome);
    std::uint64_t previous_tx = 0;
    if (outcome.winner) {
      previous_tx = last_tx[*outcome.winner];
      last_tx[*outcome.winner] = t;
    }
    if (!measured) continue;

    ++m.window_slots;
    m.rate_sum += config.normalize_power_by_n ? std::log1p(outcome.power) : outcome.rate;
    m.normalized_rate_sum += outcome.normalized_rate;
    if (outcome.collided) ++m.collisions;
    if (!outcome.winner) continue;

    const std::size_t w = *outcome.winner;
    ++m.transmissions;
    ++m.selection_counts[w];
    m.power_sum += outcome.power;
    if (!config.collect_samples || decision.fixed_power) continue;
    const auto energy = static_cast<EnergyUnits>(outcome.power);
    m.power_samples.push_back(energy);
    if (previous_tx > 0) {
      m.waiting_times.push_back(t - previous_tx);
      m.clt_pairs.emplace_back(energy, t - previous_tx);
    }
  }
  return m;
}

}  // namespace ehdiv
