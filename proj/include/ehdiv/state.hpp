#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ehdiv/arrivals.hpp"

namespace ehdiv {

/// Batteries observed at the start of slot `slot` (1-based).
struct SystemState {
  std::uint64_t slot = 1;
  std::vector<EnergyUnits> batteries;
  /// Slot of each user's most recent transmission, 0 if none yet.
  std::vector<std::uint64_t> last_tx_slot;

  SystemState() = default;
  explicit SystemState(std::size_t users) : batteries(users, 0), last_tx_slot(users, 0) {}

  std::size_t users() const { return batteries.size(); }
};

}  // namespace ehdiv
