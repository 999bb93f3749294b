#include "rlcache/replay.hpp"

#include <stdexcept>
#include <string>

#include "rlcache/errors.hpp"

namespace rlcache {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size) { return sample(batch_size, rng_); }

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (items_.size() < batch_size || batch_size == 0) {
    throw NotReadyError("replay holds " + std::to_string(items_.size()) + " transitions, batch needs " + std::to_string(batch_size));
  }
  std::vector<const Transition*> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) out.push_back(&items_[rng.below(items_.size())]);
  return out;
}

}  // namespace rlcache
