#pragma once

#include <string>
#include <vector>

#include "rlcache/observer.hpp"
#include "rlcache/types.hpp"

namespace testing {

// Subscribes to every observation kind and keeps what it was sent.
struct Recorder {
  explicit Recorder(rlcache::Observer& obs) : observer(obs) {
    rlcache::InterestSet all;
    for (int k = 0; k <= static_cast<int>(rlcache::ObservationKind::WriteSet); ++k) all.add(static_cast<rlcache::ObservationKind>(k));
    rlcache::SubscriberCallbacks cb;
    cb.on_observation = [this](const rlcache::Observation& o) { seen.push_back(o); };
    id = observer.subscribe(all, cb);
  }
  ~Recorder() { observer.unsubscribe(id); }

  std::vector<rlcache::ObservationKind> kinds() const {
    std::vector<rlcache::ObservationKind> out;
    for (const auto& o : seen) out.push_back(o.kind);
    return out;
  }

  rlcache::Observer& observer;
  rlcache::SubscriberId id;
  std::vector<rlcache::Observation> seen;
};

inline rlcache::ResultSet values(const std::string& v) { return {{"field0", v}}; }

}  // namespace testing
