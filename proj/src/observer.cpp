#include "rlcache/observer.hpp"

#include <stdexcept>

#include "rlcache/errors.hpp"

namespace rlcache {

const char* to_string(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::Hit: return "hit";
    case ObservationKind::Miss: return "miss";
    case ObservationKind::Invalidate: return "invalidate";
    case ObservationKind::Expire: return "expire";
    case ObservationKind::EvictionDecision: return "eviction_decision";
    case ObservationKind::WriteSet: return "write_set";
  }
  return "unknown";
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::Active: return "active";
    case TerminationReason::Invalidated: return "invalidated";
    case TerminationReason::Evicted: return "evicted";
    case TerminationReason::Expired: return "expired";
    case TerminationReason::Miss: return "miss";
  }
  return "unknown";
}

TerminationReason termination_for(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::Invalidate: return TerminationReason::Invalidated;
    case ObservationKind::Expire: return TerminationReason::Expired;
    case ObservationKind::EvictionDecision: return TerminationReason::Evicted;
    case ObservationKind::Miss: return TerminationReason::Miss;
    case ObservationKind::Hit:
    case ObservationKind::WriteSet: return TerminationReason::Active;
  }
  return TerminationReason::Active;
}

SubscriberId Observer::subscribe(InterestSet interests, SubscriberCallbacks callbacks) {
  if (interests.empty()) throw std::invalid_argument("subscribe: interest set must not be empty");
  auto sub = std::make_unique<Subscriber>();
  sub->id = static_cast<SubscriberId>(subscribers_.size());
  sub->interests = interests;
  sub->callbacks = std::move(callbacks);
  subscribers_.push_back(std::move(sub));
  return subscribers_.back()->id;
}

void Observer::unsubscribe(SubscriberId id) {
  if (auto* sub = lookup(id)) sub->active = false;
}

Observer::Subscriber* Observer::lookup(SubscriberId id) {
  if (id >= subscribers_.size() || !subscribers_[id]->active) return nullptr;
  return subscribers_[id].get();
}

const Observer::Subscriber* Observer::lookup(SubscriberId id) const {
  if (id >= subscribers_.size() || !subscribers_[id]->active) return nullptr;
  return subscribers_[id].get();
}

std::size_t Observer::emit(Observation observation) {
  Queued q{std::move(observation), {}};
  for (const auto& sub : subscribers_) {
    if (sub->active && sub->interests.contains(q.observation.kind)) q.targets.push_back(sub->id);
  }
  const std::size_t count = q.targets.size();
  if (count > 0) queue_.push_back(std::move(q));
  return count;
}

std::size_t Observer::dispatch() {
  std::size_t deliveries = 0;
  while (!queue_.empty()) {
    Queued q = std::move(queue_.front());
    queue_.pop_front();
    const Observation& obs = q.observation;
    for (SubscriberId id : q.targets) {
      Subscriber* sub = lookup(id);
      if (sub == nullptr) continue;
      ++deliveries;
      if (sub->callbacks.on_observation) sub->callbacks.on_observation(obs);
      // The callback may have re-entered and changed the subscriber list.
      sub = lookup(id);
      if (sub == nullptr) continue;
      ResolveResult r = resolve(id, obs.key, obs.kind, obs.time);
      if (r.status == ResolveStatus::Completed && sub->callbacks.on_complete) {
        sub->callbacks.on_complete(*r.experience);
      }
    }
  }
  return deliveries;
}

void Observer::track(SubscriberId id, IncompleteExperience experience, double watch_ttl) {
  Subscriber* sub = lookup(id);
  if (sub == nullptr) throw std::invalid_argument("track: unknown subscriber");
  if (!(watch_ttl >= 0.0)) throw std::invalid_argument("track: watch_ttl must be non-negative");
  if (sub->store.count(experience.key) != 0) {
    throw PreconditionError("track: subscriber already has an active experience for key '" + experience.key + "'");
  }
  experience.watch_ttl = watch_ttl;
  experience.termination = TerminationReason::Active;
  const Timestamp deadline = experience.created_at + watch_ttl;
  sub->deadlines.push(experience.key, deadline);
  std::string key = experience.key;
  sub->store.emplace(std::move(key), std::move(experience));
}

ResolveResult Observer::resolve(SubscriberId id, const std::string& key, ObservationKind kind, Timestamp now) {
  Subscriber* sub = lookup(id);
  if (sub == nullptr) return {};
  auto it = sub->store.find(key);
  if (it == sub->store.end()) return {};
  if (kind == ObservationKind::Hit) {
    ++it->second.hit_count;
    return {ResolveStatus::Updated, std::nullopt};
  }
  const TerminationReason reason = termination_for(kind);
  if (reason == TerminationReason::Active) return {ResolveStatus::Updated, std::nullopt};
  IncompleteExperience done = std::move(it->second);
  sub->store.erase(it);
  sub->deadlines.erase(key);
  done.termination = reason;
  done.completed_at = now;
  return {ResolveStatus::Completed, std::move(done)};
}

std::vector<IncompleteExperience> Observer::sweep(Timestamp now) {
  std::vector<IncompleteExperience> expired;
  for (std::size_t i = 0; i < subscribers_.size(); ++i) {
    const auto id = static_cast<SubscriberId>(i);
    std::vector<IncompleteExperience> mine;
    {
      Subscriber* sub = lookup(id);
      if (sub == nullptr) continue;
      while (!sub->deadlines.empty() && sub->deadlines.top().deadline <= now) {
        auto node = sub->deadlines.pop();
        auto it = sub->store.find(node.key);
        IncompleteExperience done = std::move(it->second);
        sub->store.erase(it);
        done.termination = TerminationReason::Expired;
        done.completed_at = node.deadline;
        mine.push_back(std::move(done));
      }
    }
    for (auto& done : mine) {
      Subscriber* sub = lookup(id);
      if (sub != nullptr && sub->callbacks.on_expire) sub->callbacks.on_expire(done);
      expired.push_back(std::move(done));
    }
  }
  return expired;
}

bool Observer::is_tracked(SubscriberId id, const std::string& key) const {
  const Subscriber* sub = lookup(id);
  return sub != nullptr && sub->store.count(key) != 0;
}

const IncompleteExperience* Observer::find(SubscriberId id, const std::string& key) const {
  const Subscriber* sub = lookup(id);
  if (sub == nullptr) return nullptr;
  auto it = sub->store.find(key);
  return it == sub->store.end() ? nullptr : &it->second;
}

std::size_t Observer::tracked_count(SubscriberId id) const {
  const Subscriber* sub = lookup(id);
  return sub == nullptr ? 0 : sub->store.size();
}

std::size_t Observer::tracked_count() const {
  std::size_t total = 0;
  for (const auto& sub : subscribers_) {
    if (sub->active) total += sub->store.size();
  }
  return total;
}

}  // namespace rlcache
