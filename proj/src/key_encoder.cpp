#include "rlcache/key_encoder.hpp"

namespace rlcache {

int KeyEncoder::encode(const std::string& key) {
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  if (index_.size() >= max_keys_) return 0;
  const int idx = static_cast<int>(index_.size()) + 1;
  index_.emplace(key, idx);
  return idx;
}

int KeyEncoder::peek(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? 0 : it->second;
}

}  // namespace rlcache
