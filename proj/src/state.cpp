#include "rlcache/state.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rlcache {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
double code(TerminationReason t) { return static_cast<double>(static_cast<int>(t)); }
double scaled_hits(std::uint64_t hits, const FeatureScales& s) { return clamp01(static_cast<double>(hits) / s.max_hits); }

}  // namespace

int state_dim(StateKind kind) {
  switch (kind) {
    case StateKind::Admission: return admission_layout::kDim;
    case StateKind::Ttl: return ttl_layout::kDim;
    case StateKind::MultiTask: return multitask_layout::kDim;
  }
  return 0;
}

StateVector encode_admission_state(const ObjectFeatures& f, const FeatureScales& s) {
  using namespace admission_layout;
  StateVector v(kDim);
  v(kKey) = f.key_index;
  v(kOp) = static_cast<double>(static_cast<int>(f.op));
  v(kValue) = f.value_index;
  v(kSize) = f.size / s.max_size;
  v(kTtl) = f.ttl / s.max_ttl;
  v(kRetrieval) = clamp01(f.retrieval_time / s.max_retrieval);
  v(kTermination) = code(f.termination);
  v(kHits) = scaled_hits(f.hits, s);
  return v;
}

StateVector encode_ttl_state(const ObjectFeatures& f, const FeatureScales& s) {
  using namespace ttl_layout;
  StateVector v(kDim);
  v(kKey) = f.key_index;
  v(kValue) = f.value_index;
  v(kSize) = f.size / s.max_size;
  v(kHits) = scaled_hits(f.hits, s);
  v(kTermination) = code(f.termination);
  v(kUtility) = f.utilization;
  return v;
}

StateVector encode_multitask_state(const ObjectFeatures& f, const FeatureScales& s) {
  StateVector v(multitask_layout::kDim);
  v.head(admission_layout::kDim) = encode_admission_state(f, s);
  v(multitask_layout::kUtility) = f.utilization;
  return v;
}

void check_state(const StateVector& state, StateKind kind) {
  if (state.size() != state_dim(kind)) {
    throw std::invalid_argument("state has " + std::to_string(state.size()) + " components, expected " + std::to_string(state_dim(kind)));
  }
}

StateVector with_outcome(const StateVector& state, StateKind kind, TerminationReason termination, std::uint64_t hits,
                         const FeatureScales& s) {
  check_state(state, kind);
  StateVector next = state;
  if (kind == StateKind::Ttl) {
    next(ttl_layout::kTermination) = code(termination);
    next(ttl_layout::kHits) = scaled_hits(hits, s);
  } else {
    next(admission_layout::kTermination) = code(termination);
    next(admission_layout::kHits) = scaled_hits(hits, s);
  }
  return next;
}

std::vector<EmbeddingSpec> state_embeddings(StateKind kind, int vocab, int dim) {
  if (kind == StateKind::Ttl) return {{ttl_layout::kKey, vocab, dim}, {ttl_layout::kValue, vocab, dim}};
  return {{admission_layout::kKey, vocab, dim}, {admission_layout::kValue, vocab, dim}};
}

}  // namespace rlcache
