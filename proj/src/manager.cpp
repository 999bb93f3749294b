#include "rlcache/manager.hpp"

#include <cmath>
#include <stdexcept>

#include "rlcache/errors.hpp"

namespace rlcache {

namespace {

RlSettings rl_settings(const ExperimentConfig& c, std::uint64_t seed) {
  RlSettings s;
  s.max_ttl = c.max_ttl;
  s.max_keys = c.max_keys;
  s.embedding_dim = c.embedding_dim;
  s.seed = seed;
  return s;
}

}  // namespace

CacheManager::CacheManager(const ExperimentConfig& config, std::uint64_t seed)
    : config_(config),
      clock_(config.clock, config.ops_per_second),
      backend_(mix_seed(seed, fnv1a("backend")), config.latency),
      cache_(config.capacity, &observer_),
      ledger_(config.window_size),
      audit_(observer_, ledger_) {
  validate(config_);
  load_phase(config_.record_count, seed, backend_);
  const RlSettings rl = rl_settings(config_, seed);

  if (config_.multitask) {
    multitask_ = std::make_unique<MultiTaskAgent>(observer_, cache_, rl, config_.sac, config_.cache_threshold);
    admission_ = multitask_.get();
    ttl_ = multitask_.get();
    eviction_ = multitask_.get();
    return;
  }

  if (config_.admission == "rl_admission") {
    admission_agent_ = std::make_unique<AdmissionAgent>(observer_, cache_, rl, config_.dqn, config_.rewards);
    admission_ = admission_agent_.get();
  } else {
    baseline_admission_ = std::make_unique<BaselineAdmission>(admission_policy_from_string(config_.admission));
    admission_ = baseline_admission_.get();
  }

  if (config_.eviction == "rl_eviction") {
    eviction_agent_ = std::make_unique<EvictionAgent>(observer_, cache_, rl, config_.dqn);
    eviction_ = eviction_agent_.get();
  } else {
    baseline_eviction_ = std::make_unique<BaselineEviction>(eviction_policy_from_string(config_.eviction), observer_);
    eviction_ = baseline_eviction_.get();
  }

  if (config_.ttl == "rl_ttl") {
    ttl_agent_ = std::make_unique<TtlAgent>(observer_, cache_, rl, config_.sac);
    ttl_ = ttl_agent_.get();
  } else {
    fixed_ttl_ = std::make_unique<FixedTtl>(config_.fixed_ttl);
    ttl_ = fixed_ttl_.get();
  }
}

CacheManager::~CacheManager() = default;

Timestamp CacheManager::advance() {
  const Timestamp t = clock_.tick_operation();
  const auto second = static_cast<std::int64_t>(std::floor(t));
  while (swept_second_ < second) {
    ++swept_second_;
    const auto s = static_cast<Timestamp>(swept_second_);
    cache_.sweep_expired(s);
    observer_.dispatch();
    observer_.sweep(s);
    observer_.dispatch();
    ledger_.tick(s);
  }
  return t;
}

void CacheManager::decide_and_store(const std::string& key, const ResultSet& values, OpType op, double retrieval_time, Timestamp now,
                                    bool& committed) {
  Request req;
  req.key = key;
  req.op = op;
  req.values = &values;
  req.size = result_size(values);
  req.retrieval_time = retrieval_time;
  req.now = now;

  const double ttl = ttl_->ttl_for(req);
  const bool cache_it = admission_->should_cache(req, ttl);
  committed = false;
  if (cache_it) {
    while (cache_.put(key, values, ttl, now, retrieval_time) == PutStatus::RejectedFull) {
      const std::vector<std::string> keys = eviction_->select_victims(cache_, now);
      std::vector<CacheEntry> victims;
      for (const auto& k : keys) {
        if (auto e = cache_.evict(k, now)) victims.push_back(std::move(*e));
      }
      if (victims.empty()) throw std::runtime_error("eviction strategy freed no space");
      observer_.dispatch();
      eviction_->on_evicted(victims, cache_, now);
      audit_.record_round(victims, cache_, now);
      observer_.dispatch();
      ++eviction_rounds_;
    }
    committed = true;
  }
  observer_.dispatch();
  if (committed) ledger_.on_commit(key, ttl, now);

  if (multitask_) {
    multitask_->on_decision(req, committed, ttl);
  } else {
    admission_->on_decision(req, committed, ttl);
    ttl_->on_decision(req, committed, ttl);
  }
  observer_.dispatch();
}

ReadResult CacheManager::read(const std::string& key) {
  ReadResult out;
  if (!backend_.contains(key)) return out;
  out.found = true;
  const Timestamp now = advance();
  ++requests_;
  auto hit = cache_.get(key, now);
  observer_.dispatch();
  ledger_.on_read(key, now);
  if (hit) {
    out.hit = true;
    out.values = std::move(hit->values);
    ledger_.record_request(OpType::Read, true, false, cache_.utilization());
    return out;
  }
  BackendRead fetched = backend_.read(key);
  bool committed = false;
  decide_and_store(key, fetched.values, OpType::ReadMissFetch, fetched.retrieval_time, now, committed);
  out.values = std::move(fetched.values);
  ledger_.record_request(OpType::Read, false, committed, cache_.utilization());
  return out;
}

void CacheManager::write(const std::string& key, ResultSet values) {
  const Timestamp now = advance();
  ++requests_;
  backend_.write(key, values);
  cache_.invalidate(key, now);
  observer_.dispatch();
  ledger_.on_invalidate(key, now);
  bool committed = false;
  decide_and_store(key, values, OpType::Write, Backend::latency_for(key, backend_.seed(), backend_.latency_model()), now, committed);
  ledger_.record_request(OpType::Write, false, committed, cache_.utilization());
}

void CacheManager::remove(const std::string& key) {
  const Timestamp now = advance();
  ++requests_;
  cache_.invalidate(key, now);
  observer_.dispatch();
  ledger_.on_invalidate(key, now);
  ledger_.record_request(OpType::Write, false, false, cache_.utilization());
}

void CacheManager::apply(const Operation& op) {
  if (op.kind == OpType::Write) {
    write(op.key, op.values);
  } else {
    read(op.key);
  }
}

void CacheManager::finish() {
  observer_.dispatch();
  ledger_.finish();
}

}  // namespace rlcache
