#include "contextdb/store/clock.hpp"

#include <atomic>
#include <chrono>
#include <memory>

namespace contextdb {

Clock system_clock() {
  return [] {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return static_cast<std::int64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count());
  };
}

Clock stepping_clock(std::int64_t start, std::int64_t step) {
  auto next = std::make_shared<std::atomic<std::int64_t>>(start);
  return [next, step] { return next->fetch_add(step); };
}

}  // namespace contextdb
