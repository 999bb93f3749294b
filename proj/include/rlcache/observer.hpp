#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlcache/deadline_heap.hpp"
#include "rlcache/types.hpp"

namespace rlcache {

enum class ObservationKind : std::uint8_t { Hit, Miss, Invalidate, Expire, EvictionDecision, WriteSet };

const char* to_string(ObservationKind kind);

struct Observation {
  ObservationKind kind;
  std::string key;
  Timestamp time = 0.0;
  std::optional<EntryMeta> entry;  // set whenever a resident entry is involved
};

enum class TerminationReason : std::uint8_t { Active = 0, Invalidated = 1, Evicted = 2, Expired = 3, Miss = 4 };

const char* to_string(TerminationReason reason);

// A decision whose reward-bearing outcome has not arrived yet.
struct IncompleteExperience {
  std::string key;
  StateVector frozen_state;
  Eigen::VectorXd action;
  int tag = 0;  // decision label, meaning owned by the subscriber
  Timestamp created_at = 0.0;
  double watch_ttl = 0.0;
  std::uint64_t hit_count = 0;
  TerminationReason termination = TerminationReason::Active;
  Timestamp completed_at = 0.0;
  // Raw object metadata at decision time (the state holds scaled copies).
  double size = 0.0;
  double retrieval_time = 0.0;
};

class InterestSet {
 public:
  InterestSet() = default;
  InterestSet(std::initializer_list<ObservationKind> kinds) {
    for (auto k : kinds) add(k);
  }
  void add(ObservationKind k) { bits_ |= bit(k); }
  bool contains(ObservationKind k) const { return (bits_ & bit(k)) != 0; }
  bool empty() const { return bits_ == 0; }

 private:
  static std::uint8_t bit(ObservationKind k) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  std::uint8_t bits_ = 0;
};

using SubscriberId = std::uint32_t;

struct SubscriberCallbacks {
  // Every delivered observation, before it is applied to tracked experiences.
  std::function<void(const Observation&)> on_observation;
  // A tracked experience reached a terminal observation.
  std::function<void(const IncompleteExperience&)> on_complete;
  // A tracked experience outlived its watch window without a terminal event.
  std::function<void(const IncompleteExperience&)> on_expire;
};

enum class ResolveStatus { Updated, Completed, Untracked };

struct ResolveResult {
  ResolveStatus status = ResolveStatus::Untracked;
  std::optional<IncompleteExperience> experience;  // set on Completed
};

// Maps an observation kind onto the termination it causes; Active means the
// observation does not end an experience (hits, write-sets).
TerminationReason termination_for(ObservationKind kind);

// Fan-out observation bus plus one expiring experience store per subscriber.
//
// emit() only enqueues; dispatch() delivers queued observations in FIFO order
// to every subscriber whose interest set matches. Delivery first calls the
// subscriber's on_observation, then resolves the subscriber's experience for
// that key. Callbacks may emit, track, or resolve re-entrantly.
class Observer {
 public:
  SubscriberId subscribe(InterestSet interests, SubscriberCallbacks callbacks);
  void unsubscribe(SubscriberId id);

  // Returns the number of subscribers the observation is queued for.
  std::size_t emit(Observation observation);
  // Delivers everything queued (including observations emitted during
  // delivery). Returns the number of deliveries made.
  std::size_t dispatch();
  std::size_t pending() const { return queue_.size(); }

  // Throws PreconditionError if the subscriber already has an Active
  // experience for the key.
  void track(SubscriberId id, IncompleteExperience experience, double watch_ttl);
  ResolveResult resolve(SubscriberId id, const std::string& key, ObservationKind kind, Timestamp now);

  // Expires every experience whose deadline (created_at + watch_ttl) is at or
  // before now, invoking the owners' on_expire callbacks.
  std::vector<IncompleteExperience> sweep(Timestamp now);

  bool is_tracked(SubscriberId id, const std::string& key) const;
  const IncompleteExperience* find(SubscriberId id, const std::string& key) const;
  std::size_t tracked_count(SubscriberId id) const;
  std::size_t tracked_count() const;

 private:
  struct Subscriber {
    SubscriberId id;
    InterestSet interests;
    SubscriberCallbacks callbacks;
    bool active = true;
    std::unordered_map<std::string, IncompleteExperience> store;
    DeadlineHeap deadlines;
  };

  struct Queued {
    Observation observation;
    std::vector<SubscriberId> targets;
  };

  Subscriber* lookup(SubscriberId id);
  const Subscriber* lookup(SubscriberId id) const;

  std::vector<std::unique_ptr<Subscriber>> subscribers_;
  std::deque<Queued> queue_;
};

}  // namespace rlcache
