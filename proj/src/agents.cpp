#include "rlcache/agents.hpp"

#include <cmath>

#include "rlcache/errors.hpp"

namespace rlcache {

// ---- baselines ---------------------------------------------------------------

BaselineEviction::BaselineEviction(EvictionPolicyKind kind, Observer& observer) : order_(kind), observer_(observer) {
  SubscriberCallbacks cb;
  cb.on_observation = [this](const Observation& obs) { order_.observe(obs); };
  id_ = observer_.subscribe({ObservationKind::Hit, ObservationKind::WriteSet, ObservationKind::Invalidate, ObservationKind::Expire,
                             ObservationKind::EvictionDecision},
                            std::move(cb));
}

BaselineEviction::~BaselineEviction() { observer_.unsubscribe(id_); }

std::vector<std::string> BaselineEviction::select_victims(const Cache& cache, Timestamp) {
  if (cache.size() == 0) throw PreconditionError("select_victims: cache is empty");
  return {order_.victim()};
}

// ---- shared agent plumbing ---------------------------------------------------

InterestSet lifecycle_interests() {
  return {ObservationKind::Hit, ObservationKind::Miss, ObservationKind::Invalidate, ObservationKind::Expire, ObservationKind::EvictionDecision};
}

AgentBase::AgentBase(Observer& observer, const Cache& cache, const RlSettings& settings)
    : observer_(observer), cache_(cache), settings_(settings), keys_(settings.max_keys), values_(settings.max_keys) {
  settings_.scales.max_ttl = settings.max_ttl;
}

AgentBase::~AgentBase() {
  for (SubscriberId id : subscriptions_) observer_.unsubscribe(id);
}

SubscriberId AgentBase::subscribe(InterestSet interests) {
  SubscriberCallbacks cb;
  // The id is only known after subscribing; callbacks never fire before.
  auto id_slot = std::make_shared<SubscriberId>(0);
  cb.on_complete = [this, id_slot](const IncompleteExperience& e) { finished(*id_slot, e); };
  cb.on_expire = [this, id_slot](const IncompleteExperience& e) { finished(*id_slot, e); };
  *id_slot = observer_.subscribe(interests, std::move(cb));
  subscriptions_.push_back(*id_slot);
  return *id_slot;
}

int AgentBase::value_index(const ResultSet& values) { return values.empty() ? 0 : values_.encode(values.front().second); }

ObjectFeatures AgentBase::features(const Request& req) {
  ObjectFeatures f;
  f.key_index = keys_.encode(req.key);
  f.op = req.op;
  f.value_index = req.values != nullptr ? value_index(*req.values) : 0;
  f.size = static_cast<double>(req.size);
  f.retrieval_time = req.retrieval_time;
  const auto h = history_.get(req.key);
  f.termination = h.termination;
  f.hits = h.hits;
  f.utilization = cache_.utilization();
  return f;
}

ObjectFeatures AgentBase::features(const CacheEntry& entry) {
  ObjectFeatures f;
  f.key_index = keys_.encode(entry.key);
  f.op = OpType::Read;
  f.value_index = value_index(entry.values);
  f.size = static_cast<double>(entry.size);
  f.ttl = entry.ttl;
  f.retrieval_time = entry.retrieval_time;
  f.termination = history_.get(entry.key).termination;
  f.hits = entry.hit_count;
  f.utilization = cache_.utilization();
  return f;
}

void AgentBase::track(SubscriberId ns, IncompleteExperience e, double watch) {
  if (observer_.is_tracked(ns, e.key)) {
    ++untracked_;
    return;
  }
  observer_.track(ns, std::move(e), std::max(0.0, watch));
}

// ---- admission -------------------------------------------------------------

namespace {

DqnConfig prepared(DqnConfig c, StateKind kind, const RlSettings& s, int vocab, std::string_view role) {
  c.state_dim = state_dim(kind);
  c.actions = 2;
  c.embeddings = state_embeddings(kind, vocab, s.embedding_dim);
  c.seed = mix_seed(s.seed, fnv1a(role));
  return c;
}

SacConfig prepared(SacConfig c, StateKind kind, const RlSettings& s, int vocab, std::string_view role, Eigen::VectorXd low,
                   Eigen::VectorXd high) {
  c.state_dim = state_dim(kind);
  c.embeddings = state_embeddings(kind, vocab, s.embedding_dim);
  c.low = std::move(low);
  c.high = std::move(high);
  c.seed = mix_seed(s.seed, fnv1a(role));
  return c;
}

IncompleteExperience experience(const std::string& key, StateVector state, Eigen::VectorXd action, int tag, Timestamp now, double size,
                                double retrieval_time) {
  IncompleteExperience e;
  e.key = key;
  e.frozen_state = std::move(state);
  e.action = std::move(action);
  e.tag = tag;
  e.created_at = now;
  e.size = size;
  e.retrieval_time = retrieval_time;
  return e;
}

}  // namespace

AdmissionAgent::AdmissionAgent(Observer& observer, const Cache& cache, const RlSettings& settings, DqnConfig dqn,
                               AdmissionRewardConfig reward)
    : AgentBase(observer, cache, settings),
      dqn_(prepared(std::move(dqn), StateKind::Admission, settings, keys_.vocab(), "admission")),
      reward_(reward) {
  ns_ = subscribe(lifecycle_interests());
}

StateVector AdmissionAgent::encode(const Request& req, double ttl) {
  ObjectFeatures f = features(req);
  f.ttl = ttl;
  return encode_admission_state(f, settings_.scales);
}

int AdmissionAgent::decide(const StateVector& state) {
  check_state(state, StateKind::Admission);
  ++decisions_;
  return dqn_.act(state);
}

bool AdmissionAgent::should_cache(const Request& req, double ttl) {
  pending_state_ = encode(req, ttl);
  pending_action_ = decide(pending_state_);
  return pending_action_ == 1;
}

void AdmissionAgent::on_decision(const Request& req, bool cached, double ttl) {
  const int action = cached ? 1 : 0;
  if (cached) ++cache_decisions_;
  track(ns_,
        experience(req.key, pending_state_, Eigen::VectorXd::Constant(1, action), action, req.now, static_cast<double>(req.size),
                   req.retrieval_time),
        cached ? ttl : settings_.max_ttl);
}

void AdmissionAgent::finished(SubscriberId, const IncompleteExperience& e) {
  const double r = admission_reward(e, e.tag == 1, reward_);
  history_.record(e.key, e.termination, e.hit_count);
  count_reward(r);
  dqn_.observe({e.frozen_state, e.action, r, with_outcome(e.frozen_state, StateKind::Admission, e.termination, e.hit_count, settings_.scales)});
}

// ---- eviction --------------------------------------------------------------

EvictionAgent::EvictionAgent(Observer& observer, const Cache& cache, const RlSettings& settings, DqnConfig dqn)
    : AgentBase(observer, cache, settings), dqn_(prepared(std::move(dqn), StateKind::Admission, settings, keys_.vocab(), "eviction")) {
  ns_ = subscribe(lifecycle_interests());
}

StateVector EvictionAgent::encode(const CacheEntry& entry) { return encode_admission_state(features(entry), settings_.scales); }

std::vector<std::string> EvictionAgent::select_victims(const Cache& cache, Timestamp) {
  if (cache.size() == 0) throw PreconditionError("eviction scan on an empty cache");
  const auto entries = cache.sorted_entries();
  Eigen::MatrixXd states(admission_layout::kDim, static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) states.col(static_cast<Eigen::Index>(i)) = encode(*entries[i]);
  const Eigen::MatrixXd q = dqn_.q_values(states);

  scan_.clear();
  std::vector<std::string> victims;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const bool evict = dqn_.act_from_q(q.col(col)) == 1;
    ++decisions_;
    const CacheEntry& e = *entries[i];
    scan_.push_back({e.key, states.col(col), evict ? DecisionKind::Evict : DecisionKind::Keep, e.deadline(), static_cast<double>(e.size),
                     e.retrieval_time});
    if (evict) victims.push_back(e.key);
  }
  if (victims.empty()) {
    const CacheEntry* lru = cache.lru_entry();
    ++fallbacks_;
    for (auto& s : scan_) {
      if (s.key == lru->key) s.decision = DecisionKind::Evict;
    }
    victims.push_back(lru->key);
  }
  return victims;
}

void EvictionAgent::on_evicted(const std::vector<CacheEntry>&, const Cache&, Timestamp now) {
  for (auto& s : scan_) {
    const int tag = static_cast<int>(s.decision);
    const double action = s.decision == DecisionKind::Evict ? 1.0 : 0.0;
    track(ns_, experience(s.key, std::move(s.state), Eigen::VectorXd::Constant(1, action), tag, now, s.size, s.retrieval_time),
          s.deadline - now);
  }
  scan_.clear();
}

void EvictionAgent::finished(SubscriberId, const IncompleteExperience& e) {
  const double r = eviction_reward(e, static_cast<DecisionKind>(e.tag));
  history_.record(e.key, e.termination, e.hit_count);
  count_reward(r);
  dqn_.observe({e.frozen_state, e.action, r, with_outcome(e.frozen_state, StateKind::Admission, e.termination, e.hit_count, settings_.scales)});
}

// ---- ttl -------------------------------------------------------------------

TtlAgent::TtlAgent(Observer& observer, const Cache& cache, const RlSettings& settings, SacConfig sac)
    : AgentBase(observer, cache, settings),
      sac_(prepared(std::move(sac), StateKind::Ttl, settings, keys_.vocab(), "ttl", Eigen::VectorXd::Zero(1),
                    Eigen::VectorXd::Constant(1, settings.max_ttl))) {
  ns_ = subscribe(lifecycle_interests());
  monitor_ = subscribe({ObservationKind::Invalidate});
}

StateVector TtlAgent::encode(const Request& req) { return encode_ttl_state(features(req), settings_.scales); }

double TtlAgent::ttl_for(const Request& req) {
  pending_state_ = encode(req);
  pending_ttl_ = sac_.act(pending_state_)(0);
  ++decisions_;
  return pending_ttl_;
}

void TtlAgent::on_decision(const Request& req, bool cached, double ttl) {
  if (!cached) return;
  track(ns_, experience(req.key, pending_state_, Eigen::VectorXd::Constant(1, ttl), 0, req.now, static_cast<double>(req.size), req.retrieval_time),
        ttl);
}

void TtlAgent::finished(SubscriberId ns, const IncompleteExperience& e) {
  if (ns == ns_ && e.termination == TerminationReason::Evicted) {
    if (observer_.is_tracked(monitor_, e.key)) {
      IncompleteExperience judged = e;
      judged.termination = TerminationReason::Expired;
      learn(judged);
      return;
    }
    // Watched until max_ttl after the original decision.
    observer_.track(monitor_, e, std::max(0.0, settings_.max_ttl));
    return;
  }
  learn(e);
}

void TtlAgent::learn(const IncompleteExperience& e) {
  const double utilization = e.frozen_state(ttl_layout::kUtility);
  const double r = ttl_reward(e, e.action(0), utilization, settings_.max_ttl);
  history_.record(e.key, e.termination, e.hit_count);
  count_reward(r);
  sac_.observe({e.frozen_state, e.action, r, with_outcome(e.frozen_state, StateKind::Ttl, e.termination, e.hit_count, settings_.scales)});
}

// ---- multi-task ------------------------------------------------------------

MultiTaskAgent::MultiTaskAgent(Observer& observer, const Cache& cache, const RlSettings& settings, SacConfig sac, double cache_threshold)
    : AgentBase(observer, cache, settings),
      sac_(prepared(std::move(sac), StateKind::MultiTask, settings, keys_.vocab(), "multitask", Eigen::VectorXd::Zero(2),
                    (Eigen::VectorXd(2) << 1.0, settings.max_ttl).finished())),
      threshold_(cache_threshold) {
  admission_ns_ = subscribe(lifecycle_interests());
  eviction_ns_ = subscribe(lifecycle_interests());
}

StateVector MultiTaskAgent::encode(const Request& req) { return encode_multitask_state(features(req), settings_.scales); }

StateVector MultiTaskAgent::encode(const CacheEntry& entry) { return encode_multitask_state(features(entry), settings_.scales); }

double MultiTaskAgent::ttl_for(const Request& req) {
  pending_state_ = encode(req);
  pending_action_ = sac_.act(pending_state_);
  ++decisions_;
  return pending_action_(1);
}

bool MultiTaskAgent::should_cache(const Request&, double ttl) { return admits(ttl, threshold_); }

void MultiTaskAgent::on_decision(const Request& req, bool cached, double ttl) {
  const auto tag = static_cast<int>(cached ? MultiTaskDecision::Cache : MultiTaskDecision::NoCache);
  track(admission_ns_, experience(req.key, pending_state_, pending_action_, tag, req.now, static_cast<double>(req.size), req.retrieval_time),
        cached ? ttl : settings_.max_ttl);
}

std::vector<std::string> MultiTaskAgent::select_victims(const Cache& cache, Timestamp) {
  if (cache.size() == 0) throw PreconditionError("eviction scan on an empty cache");
  const auto entries = cache.sorted_entries();
  Eigen::MatrixXd states(multitask_layout::kDim, static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) states.col(static_cast<Eigen::Index>(i)) = encode(*entries[i]);
  const Eigen::MatrixXd actions = sac_.act_batch(states);

  scan_.clear();
  std::vector<std::string> victims;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const bool evict = evicts(actions(0, col));
    ++decisions_;
    scan_.push_back({entries[i]->key, states.col(col), actions.col(col), evict, entries[i]->deadline()});
    if (evict) victims.push_back(entries[i]->key);
  }
  if (victims.empty()) {
    const CacheEntry* lru = cache.lru_entry();
    for (auto& s : scan_) {
      if (s.key == lru->key) s.evict = true;
    }
    victims.push_back(lru->key);
  }
  return victims;
}

void MultiTaskAgent::on_evicted(const std::vector<CacheEntry>&, const Cache&, Timestamp now) {
  for (auto& s : scan_) {
    const auto tag = static_cast<int>(s.evict ? MultiTaskDecision::Evict : MultiTaskDecision::Keep);
    const CacheEntry* entry = cache_.peek(s.key);
    const double size = entry != nullptr ? static_cast<double>(entry->size) : 0.0;
    track(eviction_ns_, experience(s.key, std::move(s.state), std::move(s.action), tag, now, size, 0.0), s.deadline - now);
  }
  scan_.clear();
}

void MultiTaskAgent::finished(SubscriberId, const IncompleteExperience& e) {
  const double r = multitask_experience_reward(e, static_cast<MultiTaskDecision>(e.tag));
  history_.record(e.key, e.termination, e.hit_count);
  count_reward(r);
  sac_.observe({e.frozen_state, e.action, r, with_outcome(e.frozen_state, StateKind::MultiTask, e.termination, e.hit_count, settings_.scales)});
}

}  // namespace rlcache
