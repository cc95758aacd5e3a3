#include "ehdiv/arrivals.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ehdiv {

ArrivalModel ArrivalModel::bernoulli(double p) {
  ArrivalModel model;
  model.kind = ArrivalKind::bernoulli;
  model.p = p;
  model.validate();
  return model;
}

void ArrivalModel::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("arrival probability must lie in [0, 1], got " + std::to_string(p));
  }
}

ArrivalMoments moments(const ArrivalModel& model) {
  model.validate();
  return {model.p, model.p * (1.0 - model.p)};
}

RandomStream::RandomStream(std::uint64_t seed, StreamId id) {
  using detail::kGolden;
  using detail::mix64;
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  h = mix64(h + kGolden * (id.replication + 1));
  h = mix64(h ^ (kGolden * (id.user + 1)));
  h = mix64(h + static_cast<std::uint64_t>(id.lane) * 0xd1b54a32d192ed03ULL);
  key_ = h;
}

__extension__ typedef unsigned __int128 u128;

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("RandomStream::below requires n > 0");
  }
  // Lemire's multiply-shift with rejection.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const u128 m = static_cast<u128>(operator()()) * n;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

std::uint64_t RandomStream::geometric_failures(double q) {
  if (q >= 1.0) return 0;
  if (q <= 0.0) return max();
  const double g = std::floor(std::log(uniform_open_closed()) / std::log1p(-q));
  if (g >= 1.8e19) return max();
  return static_cast<std::uint64_t>(g);
}

EnergyUnits sample_arrival(const ArrivalModel& model, RandomStream& stream) {
  switch (model.kind) {
    case ArrivalKind::bernoulli:
      return stream.bernoulli(model.p) ? 1 : 0;
  }
  return 0;
}

}  // namespace ehdiv
