#pragma once

#include <cstddef>
#include <functional>

namespace ehdiv {

/// Calls body(i) for i in [0, count) on up to `jobs` threads. Bodies write
/// their results to slots indexed by i, so output never depends on
/// scheduling. The first exception thrown by a body is rethrown after all
/// threads finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace ehdiv
