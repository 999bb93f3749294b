#include "rlcache/backend.hpp"

#include <cmath>

#include "rlcache/errors.hpp"
#include "rlcache/rng.hpp"

namespace rlcache {

std::size_t result_size(const ResultSet& values) {
  std::size_t total = 0;
  for (const auto& field : values) total += field.second.size();
  return total;
}

double Backend::latency_for(const std::string& key, std::uint64_t seed, const LatencyModel& model) {
  Rng rng(mix_seed(seed, fnv1a(key)));
  return std::exp(std::log(model.median) + model.sigma * rng.normal());
}

void Backend::write(const std::string& key, ResultSet values) {
  auto it = records_.find(key);
  if (it != records_.end()) {
    it->second.values = std::move(values);
    return;
  }
  records_.emplace(key, Record{std::move(values), latency_for(key, seed_, model_)});
}

BackendRead Backend::read(const std::string& key) const {
  auto it = records_.find(key);
  if (it == records_.end()) throw NotFoundError("backend has no record for key '" + key + "'");
  return {it->second.values, it->second.latency};
}

}  // namespace rlcache
