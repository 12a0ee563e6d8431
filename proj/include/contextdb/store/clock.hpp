#pragma once

#include <cstdint>
#include <functional>

namespace contextdb {

/// Milliseconds since the Unix epoch. Stores and the pipeline take the
/// clock as a parameter so tests can drive time explicitly.
using Clock = std::function<std::int64_t()>;

Clock system_clock();

/// Test clock: returns `start`, `start + step`, ... on successive calls.
Clock stepping_clock(std::int64_t start, std::int64_t step = 1);

}  // namespace contextdb
