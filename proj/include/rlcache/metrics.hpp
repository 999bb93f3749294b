#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlcache/cache.hpp"
#include "rlcache/observer.hpp"
#include "rlcache/types.hpp"

namespace rlcache {

struct EvictionConfusion {
  std::uint64_t true_evict = 0;
  std::uint64_t false_evict = 0;
  std::uint64_t true_miss = 0;
  std::uint64_t false_miss = 0;

  EvictionConfusion& operator+=(const EvictionConfusion& o) {
    true_evict += o.true_evict;
    false_evict += o.false_evict;
    true_miss += o.true_miss;
    false_miss += o.false_miss;
    return *this;
  }
  std::uint64_t total() const { return true_evict + false_evict + true_miss + false_miss; }
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Any ratio with a zero denominator is reported as 0.
PrecisionRecall precision_recall_f1(const EvictionConfusion& c);

enum class DecisionKind : std::uint8_t { Evict = 0, Keep = 1 };

// Evict: a Miss ends it as a false evict, anything else (invalidation,
// silence until the watch ran out) as a true evict. Keep: a true miss if the
// object was read while kept, a false miss otherwise.
// Throws std::invalid_argument for unknown kinds and Active terminations.
void record_decision_outcome(EvictionConfusion& c, DecisionKind kind, TerminationReason termination, std::uint64_t hits);

enum class TtlEventKind : std::uint8_t { Insert, Read, Invalidate };

struct TtlEvent {
  TtlEventKind kind;
  Timestamp time;
};

// Reads more than this long after insertion do not count.
inline constexpr double kOptimalTtlHorizon = 1800.0;

// History of one cached object, starting with its Insert. Unread objects get
// 0; otherwise the span to the invalidation, or to the last read when the
// object was never invalidated. Throws std::invalid_argument on an empty
// history or one that does not start with an Insert.
double optimal_ttl(const std::vector<TtlEvent>& history);

struct WindowStats {
  std::string phase;
  std::size_t index = 0;
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t commits = 0;
  EvictionConfusion confusion;
  double ttl_deviation_sum = 0.0;
  std::uint64_t ttl_records = 0;
  std::uint64_t ttl_censored = 0;  // still open when the run ended; not scored
  double utilization = 0.0;        // at the last request of the window

  double hit_rate() const { return hits + misses == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(hits + misses); }
  double caching_rate() const { return requests == 0 ? 0.0 : static_cast<double>(commits) / static_cast<double>(requests); }
  double mean_ttl_deviation() const { return ttl_records == 0 ? 0.0 : ttl_deviation_sum / static_cast<double>(ttl_records); }
  PrecisionRecall prf() const { return precision_recall_f1(confusion); }
};

// Windowed request metrics. A window holds window_size client requests and
// never spans two phases; the last window of a phase may be short.
//
// TTL deviations are charged to the window in which the object was cached,
// once its optimal TTL is known (invalidation, horizon, or end of run).
class MetricsLedger {
 public:
  explicit MetricsLedger(std::size_t window_size = 1000);

  void begin_phase(const std::string& name);
  // Counts one finished client request. `hit` is ignored for writes.
  void record_request(OpType kind, bool hit, bool committed, double utilization);
  void record_eviction_outcome(DecisionKind kind, TerminationReason termination, std::uint64_t hits);

  // TTL bookkeeping over every client read and write, resident or not.
  void on_commit(const std::string& key, double estimated_ttl, Timestamp now);
  void on_read(const std::string& key, Timestamp now);
  void on_invalidate(const std::string& key, Timestamp now);
  // Closes records whose horizon has passed.
  void tick(Timestamp now);
  // Ends the current window and closes every open TTL record as censored.
  void finish();

  const std::vector<WindowStats>& windows() const { return windows_; }
  std::size_t window_size() const { return window_size_; }
  WindowStats totals() const;
  std::uint64_t open_ttl_records() const { return open_records_; }

 private:
  struct TtlRecord {
    std::string key;
    std::size_t window;
    double estimate;
    Timestamp inserted;
    Timestamp last_read = 0.0;
    bool read = false;
    bool closed = false;
  };

  WindowStats& window();
  void close_record(std::size_t id, double optimal, bool censored);
  double record_optimal(const TtlRecord& r, const Timestamp* invalidated_at) const;

  std::size_t window_size_;
  std::string phase_ = "default";
  std::vector<WindowStats> windows_;
  bool open_ = false;

  std::vector<TtlRecord> records_;
  std::unordered_map<std::string, std::vector<std::size_t>> open_by_key_;
  std::size_t horizon_cursor_ = 0;
  std::uint64_t open_records_ = 0;
};

// Scores every eviction round, whatever strategy produced it, by tracking
// victims as Evict and every other resident without a pending decision as
// Keep, each watched for its leftover TTL.
class EvictionAudit {
 public:
  EvictionAudit(Observer& observer, MetricsLedger& ledger);
  ~EvictionAudit();
  EvictionAudit(const EvictionAudit&) = delete;
  EvictionAudit& operator=(const EvictionAudit&) = delete;

  // Call after the victims have been removed and the observer dispatched.
  // `victims` holds the removed entries, `cache` the survivors.
  void record_round(const std::vector<CacheEntry>& victims, const Cache& cache, Timestamp now);

  std::size_t pending() const { return observer_.tracked_count(id_); }

 private:
  void complete(const IncompleteExperience& e);

  Observer& observer_;
  MetricsLedger& ledger_;
  SubscriberId id_;
};

inline constexpr const char* kCsvHeader =
    "run_id,seed,phase,window_index,hit_rate,caching_rate,precision,recall,f1,mean_ttl_deviation,utilization";

void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const std::string& run_id, std::uint64_t seed, const std::vector<WindowStats>& windows);

}  // namespace rlcache
