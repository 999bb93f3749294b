#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rlcache/rng.hpp"
#include "rlcache/types.hpp"

namespace rlcache {

struct Transition {
  StateVector state;
  Eigen::VectorXd action;  // one entry holding the index for discrete agents
  double reward = 0.0;
  StateVector next_state;
  bool continuing = true;
};

// Bounded ring of transitions with seeded uniform sampling (with replacement).
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint64_t seed);

  void push(Transition t);

  // Throws NotReadyError when fewer than batch_size transitions are stored.
  std::vector<const Transition*> sample(std::size_t batch_size);
  std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  // Oldest first.
  const Transition& at(std::size_t i) const { return items_[(head_ + i) % items_.size()]; }

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // index of the oldest item once the ring is full
  Rng rng_;
};

// Linear decay from `start` at step 0 to `floor` at decay_steps, flat after.
struct EpsilonSchedule {
  double start = 1.0;
  double floor = 0.1;
  std::uint64_t decay_steps = 50000;

  double value(std::uint64_t step) const {
    if (decay_steps == 0 || step >= decay_steps) return floor;
    const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
    return start + (floor - start) * frac;
  }
};

}  // namespace rlcache
