#include "ehdiv/policies.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ehdiv {
namespace {

double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

}  // namespace

PolicySpec PolicySpec::aloha(double alpha) {
  PolicySpec s = of(PolicyKind::aloha);
  s.alpha = alpha;
  s.validate();
  return s;
}

PolicySpec PolicySpec::fixed_power(std::optional<double> level) {
  PolicySpec s = of(PolicyKind::fixed_power);
  s.level = level;
  s.validate();
  return s;
}

PolicySpec PolicySpec::fixed_contention(double q) {
  PolicySpec s = of(PolicyKind::fixed_contention);
  s.q = q;
  s.validate();
  return s;
}

PolicySpec PolicySpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;

  PolicySpec s;
  if (head == "greedy" && !has_arg) {
    s.kind = PolicyKind::greedy;
  } else if (head == "tdma" && !has_arg) {
    s.kind = PolicyKind::tdma;
  } else if (head == "aloha") {
    s.kind = PolicyKind::aloha;
    s.alpha = has_arg ? parse_real(arg, "aloha exponent") : 1.0;
  } else if ((head == "energy_aware" || head == "energy-aware") && !has_arg) {
    s.kind = PolicyKind::energy_aware;
  } else if (head == "fixed_power" || head == "fixed-power") {
    s.kind = PolicyKind::fixed_power;
    if (has_arg) s.level = parse_real(arg, "power level");
  } else if ((head == "p2p_greedy" || head == "p2p-greedy") && !has_arg) {
    s.kind = PolicyKind::p2p_greedy;
  } else if (head == "contention" && has_arg) {
    s.kind = PolicyKind::fixed_contention;
    s.q = parse_real(arg, "contention probability");
  } else {
    throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
  }
  s.validate();
  return s;
}

std::string PolicySpec::name() const {
  switch (kind) {
    case PolicyKind::greedy:
      return "greedy";
    case PolicyKind::tdma:
      return "tdma";
    case PolicyKind::aloha:
      return "aloha:" + format_real(alpha);
    case PolicyKind::energy_aware:
      return "energy_aware";
    case PolicyKind::fixed_power:
      return level ? "fixed_power:" + format_real(*level) : "fixed_power";
    case PolicyKind::p2p_greedy:
      return "p2p_greedy";
    case PolicyKind::fixed_contention:
      return "contention:" + format_real(q);
  }
  return "?";
}

void PolicySpec::validate() const {
  if (kind == PolicyKind::aloha && !(alpha > 0.0 && std::isfinite(alpha))) {
    throw std::invalid_argument("aloha exponent must be positive");
  }
  if (kind == PolicyKind::fixed_power && level && !(*level >= 0.0 && std::isfinite(*level))) {
    throw std::invalid_argument("fixed power level must be nonnegative");
  }
  if (kind == PolicyKind::fixed_contention && !(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("contention probability must lie in [0, 1]");
  }
}

bool PolicySpec::centralized() const {
  switch (kind) {
    case PolicyKind::greedy:
    case PolicyKind::tdma:
    case PolicyKind::fixed_power:
    case PolicyKind::p2p_greedy:
      return true;
    default:
      return false;
  }
}

std::size_t greedy_select(std::span<const EnergyUnits> batteries, RandomStream& stream) {
  if (batteries.empty()) {
    throw std::invalid_argument("greedy_select: no users");
  }
  EnergyUnits best = batteries[0];
  std::size_t ties = 1;
  std::size_t first = 0;
  for (std::size_t n = 1; n < batteries.size(); ++n) {
    if (batteries[n] > best) {
      best = batteries[n];
      ties = 1;
      first = n;
    } else if (batteries[n] == best) {
      ++ties;
    }
  }
  if (ties == 1) return first;
  std::uint64_t pick = stream.below(ties);
  for (std::size_t n = first;; ++n) {
    if (batteries[n] == best && pick-- == 0) return n;
  }
}

std::size_t tdma_select(std::uint64_t slot, std::size_t users) {
  if (users == 0) throw std::invalid_argument("tdma_select: no users");
  if (slot == 0) throw std::invalid_argument("tdma_select: slots are 1-based");
  return static_cast<std::size_t>((slot - 1) % users);
}

double energy_aware_threshold(std::size_t users, double p) {
  return p * std::numbers::e * std::log(static_cast<double>(users));
}

ContentionClock::ContentionClock(RandomStream stream, double q, std::uint64_t first_slot)
    : stream_(stream), q_(q), next_(first_slot) {
  // Pretend an attempt happened just before first_slot.
  next_ = first_slot - 1;
  advance();
}

void ContentionClock::advance() {
  const std::uint64_t gap = stream_.geometric_failures(q_);
  if (gap >= kNever - next_ - 1) {
    next_ = kNever;
  } else {
    next_ += gap + 1;
  }
}

void aloha_decide(std::uint64_t slot, std::span<ContentionClock> clocks, PolicyDecision& out) {
  out.clear();
  for (std::size_t n = 0; n < clocks.size(); ++n) {
    if (clocks[n].fires(slot)) out.contenders.push_back(n);
  }
}

void energy_aware_decide(std::uint64_t slot, std::span<const EnergyUnits> batteries, double threshold,
                         std::span<ContentionClock> clocks, PolicyDecision& out) {
  out.clear();
  for (std::size_t n = 0; n < clocks.size(); ++n) {
    // The coin is consumed whether or not the battery qualifies.
    if (clocks[n].fires(slot) && static_cast<double>(batteries[n]) >= threshold) {
      out.contenders.push_back(n);
    }
  }
}

PolicyDecision benchmark_decide(const PolicySpec& spec, const ArrivalModel& arrival) {
  spec.validate();
  PolicyDecision d;
  d.scheduled = true;
  d.contenders.push_back(0);
  switch (spec.kind) {
    case PolicyKind::fixed_power:
      d.fixed_power = spec.level.value_or(moments(arrival).mean);
      break;
    case PolicyKind::p2p_greedy:
      break;
    default:
      throw std::invalid_argument("benchmark_decide: not a benchmark scheme");
  }
  return d;
}

Policy::Policy(PolicySpec spec, std::size_t users, const ArrivalModel& arrival, std::uint64_t seed,
               std::uint64_t replication)
    : spec_(spec),
      users_(users),
      arrival_(arrival),
      scheduler_(seed, {replication, 0, StreamLane::scheduler}) {
  spec_.validate();
  arrival_.validate();
  if (users_ == 0) throw std::invalid_argument("policy needs at least one user");
  if (spec_.benchmark() && users_ != 1) {
    throw std::invalid_argument("benchmark schemes run a single link (N = 1)");
  }
  const double n = static_cast<double>(users_);
  switch (spec_.kind) {
    case PolicyKind::aloha:
      attempt_q_ = std::pow(n, -spec_.alpha);
      break;
    case PolicyKind::energy_aware:
      attempt_q_ = 1.0 / n;
      threshold_ = energy_aware_threshold(users_, arrival_.p);
      break;
    case PolicyKind::fixed_contention:
      attempt_q_ = spec_.q;
      break;
    default:
      return;
  }
  clocks_.reserve(users_);
  for (std::size_t u = 0; u < users_; ++u) {
    clocks_.emplace_back(RandomStream(seed, {replication, u, StreamLane::contention}), attempt_q_, 1);
  }
}

void Policy::decide(const SystemState& state, PolicyDecision& out) {
  switch (spec_.kind) {
    case PolicyKind::greedy:
      out.clear();
      out.scheduled = true;
      out.contenders.push_back(greedy_select(state.batteries, scheduler_));
      return;
    case PolicyKind::tdma:
      out.clear();
      out.scheduled = true;
      out.contenders.push_back(tdma_select(state.slot, users_));
      return;
    case PolicyKind::aloha:
    case PolicyKind::fixed_contention:
      aloha_decide(state.slot, clocks_, out);
      return;
    case PolicyKind::energy_aware:
      energy_aware_decide(state.slot, state.batteries, threshold_, clocks_, out);
      return;
    case PolicyKind::fixed_power:
    case PolicyKind::p2p_greedy:
      out = benchmark_decide(spec_, arrival_);
      return;
  }
}

}  // namespace ehdiv
