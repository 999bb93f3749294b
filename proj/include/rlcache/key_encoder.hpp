#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>

namespace rlcache {

// Dictionary from observed strings to embedding indices. Index 0 is the
// out-of-vocabulary bucket; the first max_keys distinct strings get 1, 2, ...
class KeyEncoder {
 public:
  static constexpr std::size_t kDefaultMaxKeys = 16384;

  explicit KeyEncoder(std::size_t max_keys = kDefaultMaxKeys) : max_keys_(max_keys) {}

  int encode(const std::string& key);
  // Lookup without assigning.
  int peek(const std::string& key) const;

  std::size_t size() const { return index_.size(); }
  std::size_t max_keys() const { return max_keys_; }
  // Embedding table width, OOV column included.
  int vocab() const { return static_cast<int>(max_keys_ + 1); }

 private:
  std::size_t max_keys_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace rlcache
