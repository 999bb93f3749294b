#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>

#include "rlcache/types.hpp"

namespace rlcache {

enum class ClockMode { Virtual, Wall };

// Virtual mode advances by 1 / ops_per_second per processed operation, which
// makes a run a pure function of its operation sequence. Wall mode reads a
// steady clock. Either way now() never decreases.
class Clock {
 public:
  explicit Clock(ClockMode mode = ClockMode::Virtual, double ops_per_second = 100.0)
      : mode_(mode), ops_per_second_(ops_per_second), start_(std::chrono::steady_clock::now()) {
    if (!(ops_per_second > 0.0)) throw std::invalid_argument("ops_per_second must be positive");
  }

  ClockMode mode() const { return mode_; }
  double ops_per_second() const { return ops_per_second_; }
  std::uint64_t operations() const { return ops_; }

  Timestamp now() const {
    if (mode_ == ClockMode::Virtual) return static_cast<double>(ops_) / ops_per_second_;
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    const Timestamp t = std::chrono::duration<double>(elapsed).count();
    if (t > last_wall_) last_wall_ = t;
    return last_wall_;
  }

  // Marks one operation as processed and returns the time it is issued at.
  Timestamp tick_operation() {
    const Timestamp t = now();
    ++ops_;
    return t;
  }

 private:
  ClockMode mode_;
  double ops_per_second_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t ops_ = 0;
  mutable Timestamp last_wall_ = 0.0;
};

}  // namespace rlcache
