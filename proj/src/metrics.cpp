#include "rlcache/metrics.hpp"

#include <cinttypes>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rlcache {

PrecisionRecall precision_recall_f1(const EvictionConfusion& c) {
  const double correct = static_cast<double>(c.true_evict + c.true_miss);
  const double p_den = correct + static_cast<double>(c.false_evict);
  const double r_den = correct + static_cast<double>(c.false_miss);
  PrecisionRecall out;
  out.precision = p_den == 0.0 ? 0.0 : correct / p_den;
  out.recall = r_den == 0.0 ? 0.0 : correct / r_den;
  const double sum = out.precision + out.recall;
  out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
  return out;
}

void record_decision_outcome(EvictionConfusion& c, DecisionKind kind, TerminationReason termination, std::uint64_t hits) {
  if (termination == TerminationReason::Active) throw std::invalid_argument("decision outcome: experience is still active");
  switch (kind) {
    case DecisionKind::Evict:
      if (termination == TerminationReason::Miss) ++c.false_evict;
      else ++c.true_evict;
      return;
    case DecisionKind::Keep:
      if (hits > 0) ++c.true_miss;
      else ++c.false_miss;
      return;
  }
  throw std::invalid_argument("decision outcome: unknown decision kind");
}

double optimal_ttl(const std::vector<TtlEvent>& history) {
  if (history.empty()) throw std::invalid_argument("optimal_ttl: empty history");
  if (history.front().kind != TtlEventKind::Insert) throw std::invalid_argument("optimal_ttl: history must start with an insert");
  const Timestamp inserted = history.front().time;
  bool read = false;
  Timestamp last_read = inserted;
  for (std::size_t i = 1; i < history.size(); ++i) {
    const TtlEvent& e = history[i];
    if (e.kind == TtlEventKind::Invalidate) return read ? e.time - inserted : 0.0;
    if (e.kind == TtlEventKind::Read && e.time - inserted <= kOptimalTtlHorizon) {
      read = true;
      last_read = e.time;
    }
  }
  return read ? last_read - inserted : 0.0;
}

MetricsLedger::MetricsLedger(std::size_t window_size) : window_size_(window_size) {
  if (window_size == 0) throw std::invalid_argument("window size must be positive");
}

WindowStats& MetricsLedger::window() {
  if (!open_) {
    WindowStats w;
    w.phase = phase_;
    w.index = windows_.size();
    windows_.push_back(std::move(w));
    open_ = true;
  }
  return windows_.back();
}

void MetricsLedger::begin_phase(const std::string& name) {
  phase_ = name;
  open_ = false;
}

void MetricsLedger::record_request(OpType kind, bool hit, bool committed, double utilization) {
  WindowStats& w = window();
  ++w.requests;
  if (kind != OpType::Write) {
    if (hit) ++w.hits;
    else ++w.misses;
  }
  if (committed) ++w.commits;
  w.utilization = utilization;
  if (w.requests >= window_size_) open_ = false;
}

void MetricsLedger::record_eviction_outcome(DecisionKind kind, TerminationReason termination, std::uint64_t hits) {
  record_decision_outcome(window().confusion, kind, termination, hits);
}

void MetricsLedger::on_commit(const std::string& key, double estimated_ttl, Timestamp now) {
  const std::size_t id = records_.size();
  records_.push_back({key, window().index, estimated_ttl, now});
  open_by_key_[key].push_back(id);
  ++open_records_;
}

void MetricsLedger::on_read(const std::string& key, Timestamp now) {
  auto it = open_by_key_.find(key);
  if (it == open_by_key_.end()) return;
  for (std::size_t id : it->second) {
    TtlRecord& r = records_[id];
    if (r.closed || now - r.inserted > kOptimalTtlHorizon) continue;
    r.read = true;
    r.last_read = now;
  }
}

double MetricsLedger::record_optimal(const TtlRecord& r, const Timestamp* invalidated_at) const {
  if (!r.read) return 0.0;
  return (invalidated_at != nullptr ? *invalidated_at : r.last_read) - r.inserted;
}

void MetricsLedger::close_record(std::size_t id, double optimal, bool censored) {
  TtlRecord& r = records_[id];
  if (r.closed) return;
  r.closed = true;
  --open_records_;
  WindowStats& w = windows_[r.window];
  // A censored record's optimum is unknown, so it is counted but not scored.
  if (censored) {
    ++w.ttl_censored;
    return;
  }
  w.ttl_deviation_sum += std::abs(r.estimate - optimal);
  ++w.ttl_records;
}

void MetricsLedger::on_invalidate(const std::string& key, Timestamp now) {
  auto it = open_by_key_.find(key);
  if (it == open_by_key_.end()) return;
  for (std::size_t id : it->second) {
    if (!records_[id].closed) close_record(id, record_optimal(records_[id], &now), false);
  }
  open_by_key_.erase(it);
}

void MetricsLedger::tick(Timestamp now) {
  while (horizon_cursor_ < records_.size() && records_[horizon_cursor_].inserted + kOptimalTtlHorizon <= now) {
    const std::size_t id = horizon_cursor_++;
    if (records_[id].closed) continue;
    close_record(id, record_optimal(records_[id], nullptr), false);
    auto it = open_by_key_.find(records_[id].key);
    if (it != open_by_key_.end()) {
      std::erase(it->second, id);
      if (it->second.empty()) open_by_key_.erase(it);
    }
  }
}

void MetricsLedger::finish() {
  open_ = false;
  for (std::size_t id = horizon_cursor_; id < records_.size(); ++id) {
    if (!records_[id].closed) close_record(id, record_optimal(records_[id], nullptr), true);
  }
  open_by_key_.clear();
  horizon_cursor_ = records_.size();
}

WindowStats MetricsLedger::totals() const {
  WindowStats t;
  t.phase = "total";
  for (const auto& w : windows_) {
    t.requests += w.requests;
    t.hits += w.hits;
    t.misses += w.misses;
    t.commits += w.commits;
    t.confusion += w.confusion;
    t.ttl_deviation_sum += w.ttl_deviation_sum;
    t.ttl_records += w.ttl_records;
    t.ttl_censored += w.ttl_censored;
    t.utilization = w.utilization;
  }
  return t;
}

EvictionAudit::EvictionAudit(Observer& observer, MetricsLedger& ledger) : observer_(observer), ledger_(ledger) {
  SubscriberCallbacks cb;
  cb.on_complete = [this](const IncompleteExperience& e) { complete(e); };
  cb.on_expire = [this](const IncompleteExperience& e) { complete(e); };
  id_ = observer_.subscribe({ObservationKind::Hit, ObservationKind::Miss, ObservationKind::Invalidate, ObservationKind::Expire,
                             ObservationKind::EvictionDecision},
                            std::move(cb));
}

EvictionAudit::~EvictionAudit() { observer_.unsubscribe(id_); }

void EvictionAudit::complete(const IncompleteExperience& e) {
  const auto kind = static_cast<DecisionKind>(e.tag);
  ledger_.record_eviction_outcome(kind, e.termination, e.hit_count);
}

void EvictionAudit::record_round(const std::vector<CacheEntry>& victims, const Cache& cache, Timestamp now) {
  auto track = [&](const std::string& key, double deadline, DecisionKind kind) {
    IncompleteExperience e;
    e.key = key;
    e.tag = static_cast<int>(kind);
    e.created_at = now;
    observer_.track(id_, std::move(e), std::max(0.0, deadline - now));
  };
  for (const auto& v : victims) {
    if (!observer_.is_tracked(id_, v.key)) track(v.key, v.deadline(), DecisionKind::Evict);
  }
  // Outcomes are counted, so tracking order does not matter here.
  for (const auto& [key, e] : cache.entries()) {
    if (!observer_.is_tracked(id_, key)) track(key, e.deadline(), DecisionKind::Keep);
  }
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& out, const std::string& run_id, std::uint64_t seed, const std::vector<WindowStats>& windows) {
  char buf[512];
  for (const auto& w : windows) {
    const PrecisionRecall prf = w.prf();
    std::snprintf(buf, sizeof(buf), "%s,%" PRIu64 ",%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", run_id.c_str(), seed, w.phase.c_str(), w.index,
                  w.hit_rate(), w.caching_rate(), prf.precision, prf.recall, prf.f1, w.mean_ttl_deviation(), w.utilization);
    out << buf;
  }
}

}  // namespace rlcache
