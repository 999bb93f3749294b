#include "rlcache/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlcache {

const char* to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Hotspot: return "hotspot";
    case DistributionKind::Zipfian: return "zipfian";
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::Periodic: return "periodic";
  }
  return "unknown";
}

DistributionKind distribution_from_string(std::string_view name) {
  if (name == "hotspot") return DistributionKind::Hotspot;
  if (name == "zipfian") return DistributionKind::Zipfian;
  if (name == "uniform") return DistributionKind::Uniform;
  if (name == "periodic") return DistributionKind::Periodic;
  throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

void WorkloadSpec::validate() const {
  if (!(read_fraction >= 0.0 && read_fraction <= 1.0)) throw std::invalid_argument("read_fraction must be in [0, 1]");
  if (record_count == 0) throw std::invalid_argument("record_count must be positive");
  if (query_count == 0) throw std::invalid_argument("query_count must be positive");
  const Distribution& d = distribution;
  if (d.kind == DistributionKind::Hotspot) {
    if (!(d.hot_fraction > 0.0 && d.hot_fraction < 1.0)) throw std::invalid_argument("hot_fraction must be in (0, 1)");
    if (!(d.hot_opn_fraction >= 0.0 && d.hot_opn_fraction <= 1.0)) throw std::invalid_argument("hot_opn_fraction must be in [0, 1]");
  }
  if (d.kind == DistributionKind::Zipfian && !(d.theta >= 0.0)) throw std::invalid_argument("theta must be non-negative");
  if (d.kind == DistributionKind::Periodic && !(d.period > 0.0)) throw std::invalid_argument("period must be positive");
}

WorkloadSpec workload_preset(std::string_view name) {
  WorkloadSpec w;
  w.name = std::string(name);
  if (name == "read_only") w.read_fraction = 1.0;
  else if (name == "read_mostly") w.read_fraction = 0.95;
  else if (name == "read_dominant") w.read_fraction = 0.75;
  else if (name == "mix") w.read_fraction = 0.5;
  else if (name == "write_heavy") w.read_fraction = 0.0;
  else throw std::invalid_argument("unknown workload preset '" + std::string(name) + "'");
  return w;
}

std::vector<std::string> workload_preset_names() { return {"read_only", "read_mostly", "read_dominant", "mix", "write_heavy"}; }

std::string record_key(std::size_t index) { return "user" + std::to_string(index); }

ResultSet random_record(Rng& rng) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  ResultSet out;
  out.reserve(10);
  for (int f = 0; f < 10; ++f) {
    std::string value(100, ' ');
    for (char& c : value) c = kAlphabet[rng.below(sizeof(kAlphabet) - 1)];
    out.emplace_back("field" + std::to_string(f), std::move(value));
  }
  return out;
}

std::size_t load_phase(std::size_t record_count, std::uint64_t seed, Backend& backend) {
  Rng rng(mix_seed(seed, fnv1a("load")));
  for (std::size_t i = 0; i < record_count; ++i) backend.write(record_key(i), random_record(rng));
  return record_count;
}

ZipfSampler::ZipfSampler(std::size_t n, double theta) {
  if (n == 0) throw std::invalid_argument("zipf: n must be positive");
  cdf_.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += 1.0 / std::pow(static_cast<double>(i + 1), theta);
    cdf_[i] = total;
  }
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::size_t ZipfSampler::sample(Rng& rng) const {
  const double u = rng.uniform();
  return static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
}

double ZipfSampler::pmf(std::size_t i) const { return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1]; }

WorkloadGenerator::WorkloadGenerator(WorkloadSpec spec, std::uint64_t seed, double ops_per_second)
    : spec_((spec.validate(), std::move(spec))),
      rng_(seed),
      zipf_(spec_.distribution.kind == DistributionKind::Zipfian ? spec_.record_count : 1, spec_.distribution.theta),
      ops_per_second_(ops_per_second) {}

std::size_t WorkloadGenerator::key_index() {
  const std::size_t n = spec_.record_count;
  const Distribution& d = spec_.distribution;
  switch (d.kind) {
    case DistributionKind::Zipfian: return zipf_.sample(rng_);
    case DistributionKind::Hotspot: {
      const auto hot = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(d.hot_fraction * static_cast<double>(n))), 1, n);
      if (hot == n || rng_.bernoulli(d.hot_opn_fraction)) return rng_.below(hot);
      return hot + rng_.below(n - hot);
    }
    case DistributionKind::Uniform:
    case DistributionKind::Periodic: return rng_.below(n);
  }
  return 0;
}

Operation WorkloadGenerator::next() {
  Operation op;
  op.step = step_;
  if (spec_.distribution.kind == DistributionKind::Periodic) {
    // Key j is rewritten at steps ceil((j + m * n) * period_ops / n).
    const auto n = static_cast<std::uint64_t>(spec_.record_count);
    const auto period_ops = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(spec_.distribution.period * ops_per_second_)));
    const std::uint64_t slot = step_ * n / period_ops;
    const bool write = step_ == 0 || slot != (step_ - 1) * n / period_ops;
    if (write) {
      op.kind = OpType::Write;
      op.key = record_key(static_cast<std::size_t>(slot % n));
      op.values = random_record(rng_);
    } else {
      op.kind = OpType::Read;
      op.key = record_key(key_index());
    }
  } else {
    op.kind = rng_.bernoulli(spec_.read_fraction) ? OpType::Read : OpType::Write;
    op.key = record_key(key_index());
    if (op.kind == OpType::Write) op.values = random_record(rng_);
  }
  ++step_;
  return op;
}

}  // namespace rlcache
