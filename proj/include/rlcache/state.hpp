#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlcache/mlp.hpp"
#include "rlcache/observer.hpp"
#include "rlcache/types.hpp"

namespace rlcache {

// Fixed scaling constants for the numeric features.
struct FeatureScales {
  double max_size = 4096.0;
  double max_ttl = 120.0;
  double max_retrieval = 0.1;
  double max_hits = 100.0;
};

// Raw description of one object at decision time.
struct ObjectFeatures {
  int key_index = 0;
  OpType op = OpType::Read;
  int value_index = 0;
  double size = 0.0;
  double ttl = 0.0;
  double retrieval_time = 0.0;
  TerminationReason termination = TerminationReason::Active;
  std::uint64_t hits = 0;
  double utilization = 0.0;
};

enum class StateKind { Admission, Ttl, MultiTask };

// Positions within each state vector.
namespace admission_layout {
inline constexpr int kKey = 0, kOp = 1, kValue = 2, kSize = 3, kTtl = 4, kRetrieval = 5, kTermination = 6, kHits = 7;
inline constexpr int kDim = 8;
}  // namespace admission_layout

namespace ttl_layout {
inline constexpr int kKey = 0, kValue = 1, kSize = 2, kHits = 3, kTermination = 4, kUtility = 5;
inline constexpr int kDim = 6;
}  // namespace ttl_layout

namespace multitask_layout {
// The admission layout followed by the cache utility.
inline constexpr int kUtility = 8;
inline constexpr int kDim = 9;
}  // namespace multitask_layout

int state_dim(StateKind kind);
StateVector encode_admission_state(const ObjectFeatures& f, const FeatureScales& s);
StateVector encode_ttl_state(const ObjectFeatures& f, const FeatureScales& s);
StateVector encode_multitask_state(const ObjectFeatures& f, const FeatureScales& s);
// Throws std::invalid_argument if the length does not match the kind.
void check_state(const StateVector& state, StateKind kind);

// Copy of `state` with the termination and hit-count features replaced by
// the experience outcome; used as the successor state of a transition.
StateVector with_outcome(const StateVector& state, StateKind kind, TerminationReason termination, std::uint64_t hits,
                         const FeatureScales& s);

// Embedded positions (key and value token) for a state kind.
std::vector<EmbeddingSpec> state_embeddings(StateKind kind, int vocab, int dim);

// Last known outcome per key, fed back into later states.
class KeyHistory {
 public:
  struct Entry {
    TerminationReason termination = TerminationReason::Active;
    std::uint64_t hits = 0;
  };
  void record(const std::string& key, TerminationReason termination, std::uint64_t hits) { map_[key] = {termination, hits}; }
  Entry get(const std::string& key) const {
    auto it = map_.find(key);
    return it == map_.end() ? Entry{} : it->second;
  }

 private:
  std::unordered_map<std::string, Entry> map_;
};

}  // namespace rlcache
