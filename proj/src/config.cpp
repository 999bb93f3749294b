#include "rlcache/config.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <fstream>
#include <set>
#include <sstream>

#include "rlcache/errors.hpp"
#include "rlcache/rng.hpp"

namespace rlcache {

using nlohmann::json;

namespace {

const std::set<std::string> kAdmission{"write_through", "write_on_read", "rl_admission"};
const std::set<std::string> kEviction{"lru", "lfu", "fifo", "rl_eviction"};
const std::set<std::string> kTtl{"fixed_ttl", "rl_ttl"};

std::vector<WorkloadSpec> default_phases() { return {workload_preset("read_mostly")}; }

// Typed field readers that report the JSON path on failure.
template <typename T>
T get_as(const json& v, const std::string& path) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path, "has the wrong type");
  }
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path, "must be a non-negative integer");
  return v.get<std::size_t>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "must be a string");
  return v.get<std::string>();
}

std::vector<int> get_layers(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "must be a non-empty array of layer widths");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t w = get_count(v[i], path + "/" + std::to_string(i));
    if (w == 0) throw ConfigError(path + "/" + std::to_string(i), "layer width must be positive");
    out.push_back(static_cast<int>(w));
  }
  return out;
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "must be an object");
}

[[noreturn]] void unknown(const std::string& path) { throw ConfigError(path, "unknown field"); }

void parse_epsilon(EpsilonSchedule& e, const json& v, const std::string& path) {
  require_object(v, path);
  for (const auto& [k, item] : v.items()) {
    const std::string p = path + "/" + k;
    if (k == "start") e.start = get_number(item, p);
    else if (k == "floor") e.floor = get_number(item, p);
    else if (k == "decay_steps") e.decay_steps = get_count(item, p);
    else unknown(p);
  }
}

void parse_dqn(DqnConfig& d, const json& v, const std::string& path) {
  require_object(v, path);
  for (const auto& [k, item] : v.items()) {
    const std::string p = path + "/" + k;
    if (k == "hidden") d.hidden = get_layers(item, p);
    else if (k == "gamma") d.gamma = get_number(item, p);
    else if (k == "lr") d.lr = get_number(item, p);
    else if (k == "batch_size") d.batch_size = get_count(item, p);
    else if (k == "replay_capacity") d.replay_capacity = get_count(item, p);
    else if (k == "sync_interval") d.sync_interval = get_count(item, p);
    else if (k == "warmup") d.warmup = get_count(item, p);
    else if (k == "epsilon") parse_epsilon(d.epsilon, item, p);
    else unknown(p);
  }
}

void parse_sac(SacConfig& s, const json& v, const std::string& path) {
  require_object(v, path);
  for (const auto& [k, item] : v.items()) {
    const std::string p = path + "/" + k;
    if (k == "hidden") s.hidden = get_layers(item, p);
    else if (k == "gamma") s.gamma = get_number(item, p);
    else if (k == "lr") s.lr = get_number(item, p);
    else if (k == "alpha") s.alpha = get_number(item, p);
    else if (k == "tau") s.tau = get_number(item, p);
    else if (k == "batch_size") s.batch_size = get_count(item, p);
    else if (k == "replay_capacity") s.replay_capacity = get_count(item, p);
    else if (k == "warmup") s.warmup = get_count(item, p);
    else unknown(p);
  }
}

void parse_rewards(AdmissionRewardConfig& r, const json& v, const std::string& path) {
  require_object(v, path);
  for (const auto& [k, item] : v.items()) {
    const std::string p = path + "/" + k;
    if (k == "scale_by_retrieval") r.scale_by_retrieval = get_bool(item, p);
    else if (k == "mean_retrieval") r.mean_retrieval = get_number(item, p);
    else if (k == "scale_by_hit_density") r.scale_by_hit_density = get_bool(item, p);
    else unknown(p);
  }
}

void parse_distribution(Distribution& d, const json& v, const std::string& path) {
  if (v.is_string()) {
    try {
      d.kind = distribution_from_string(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
    return;
  }
  require_object(v, path);
  for (const auto& [k, item] : v.items()) {
    const std::string p = path + "/" + k;
    if (k == "kind") {
      try {
        d.kind = distribution_from_string(get_string(item, p));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(p, e.what());
      }
    } else if (k == "hot_fraction") d.hot_fraction = get_number(item, p);
    else if (k == "hot_opn_fraction") d.hot_opn_fraction = get_number(item, p);
    else if (k == "theta") d.theta = get_number(item, p);
    else if (k == "period") d.period = get_number(item, p);
    else unknown(p);
  }
}

WorkloadSpec preset_or_error(const std::string& name, const std::string& path) {
  try {
    return workload_preset(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

WorkloadSpec parse_phase(const json& v, const std::string& path) {
  if (v.is_string()) return preset_or_error(v.get<std::string>(), path);
  require_object(v, path);
  WorkloadSpec w;
  if (v.contains("preset")) w = preset_or_error(get_string(v.at("preset"), path + "/preset"), path + "/preset");
  for (const auto& [k, item] : v.items()) {
    const std::string p = path + "/" + k;
    if (k == "preset") continue;
    if (k == "name") w.name = get_string(item, p);
    else if (k == "read_fraction") w.read_fraction = get_number(item, p);
    else if (k == "queries") w.query_count = get_count(item, p);
    else if (k == "distribution") parse_distribution(w.distribution, item, p);
    else unknown(p);
  }
  return w;
}

json distribution_json(const Distribution& d) {
  return {{"kind", to_string(d.kind)}, {"hot_fraction", d.hot_fraction}, {"hot_opn_fraction", d.hot_opn_fraction}, {"theta", d.theta},
          {"period", d.period}};
}

}  // namespace

ExperimentConfig::ExperimentConfig() : phases(default_phases()) {}

bool ExperimentConfig::uses_rl() const {
  return multitask || admission == "rl_admission" || eviction == "rl_eviction" || ttl == "rl_ttl";
}

std::vector<std::string> config_preset_names() {
  return {"five_phase", "full_scale", "robustness", "epsilon_evaluation", "epsilon_hyperparameters"};
}

ExperimentConfig config_preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "five_phase" || name == "full_scale") {
    c.phases.clear();
    for (const auto& p : workload_preset_names()) {
      WorkloadSpec w = workload_preset(p);
      if (name == "full_scale") w.query_count = 100000;
      c.phases.push_back(w);
    }
    c.seeds = {1, 2, 3};
    if (name == "full_scale") c.max_ttl = 3600.0;
  } else if (name == "robustness") {
    c.admission = "rl_admission";
    c.seeds.clear();
    for (std::uint64_t s = 1; s <= 13; ++s) c.seeds.push_back(s);
  } else if (name == "epsilon_evaluation") {
    c.dqn.epsilon = {1.0, 0.1, 50000};
  } else if (name == "epsilon_hyperparameters") {
    c.dqn.epsilon = {1.0, 0.2, 250000};
  } else {
    throw ConfigError("/preset", "unknown preset '" + name + "'");
  }
  return c;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  ExperimentConfig c;
  if (doc.contains("preset")) c = config_preset(get_string(doc.at("preset"), "/preset"));

  bool slot_given = false;
  bool strategy_multitask = false;
  bool seeds_given = false;
  std::optional<std::size_t> repetitions;
  for (const auto& [k, item] : doc.items()) {
    const std::string p = "/" + k;
    if (k == "preset") continue;
    if (k == "name") c.name = get_string(item, p);
    else if (k == "strategy") {
      const std::string s = get_string(item, p);
      if (s != "multitask" && s != "rl_multitask") throw ConfigError(p, "only \"multitask\" is accepted here; use admission/eviction/ttl for slots");
      strategy_multitask = true;
    } else if (k == "admission" || k == "eviction" || k == "ttl") {
      const std::string s = get_string(item, p);
      const auto& allowed = k == "admission" ? kAdmission : k == "eviction" ? kEviction : kTtl;
      if (!allowed.count(s)) throw ConfigError(p, "unknown strategy '" + s + "'");
      (k == "admission" ? c.admission : k == "eviction" ? c.eviction : c.ttl) = s;
      slot_given = true;
    } else if (k == "capacity") c.capacity = get_count(item, p);
    else if (k == "max_ttl") c.max_ttl = get_number(item, p);
    else if (k == "fixed_ttl") c.fixed_ttl = get_number(item, p);
    else if (k == "cache_threshold") c.cache_threshold = get_number(item, p);
    else if (k == "record_count") c.record_count = get_count(item, p);
    else if (k == "window_size") c.window_size = get_count(item, p);
    else if (k == "phases") {
      if (!item.is_array() || item.empty()) throw ConfigError(p, "must be a non-empty array");
      c.phases.clear();
      for (std::size_t i = 0; i < item.size(); ++i) c.phases.push_back(parse_phase(item[i], p + "/" + std::to_string(i)));
    } else if (k == "seeds") {
      if (!item.is_array() || item.empty()) throw ConfigError(p, "must be a non-empty array");
      c.seeds.clear();
      for (std::size_t i = 0; i < item.size(); ++i) c.seeds.push_back(get_count(item[i], p + "/" + std::to_string(i)));
      seeds_given = true;
    } else if (k == "repetitions") {
      repetitions = get_count(item, p);
      if (*repetitions == 0) throw ConfigError(p, "must be at least 1");
    } else if (k == "clock") {
      const std::string s = get_string(item, p);
      if (s == "virtual") c.clock = ClockMode::Virtual;
      else if (s == "wall") c.clock = ClockMode::Wall;
      else throw ConfigError(p, "must be \"virtual\" or \"wall\"");
    } else if (k == "ops_per_second") c.ops_per_second = get_number(item, p);
    else if (k == "latency") {
      require_object(item, p);
      for (const auto& [lk, lv] : item.items()) {
        if (lk == "median") c.latency.median = get_number(lv, p + "/median");
        else if (lk == "sigma") c.latency.sigma = get_number(lv, p + "/sigma");
        else unknown(p + "/" + lk);
      }
    } else if (k == "dqn") parse_dqn(c.dqn, item, p);
    else if (k == "sac") parse_sac(c.sac, item, p);
    else if (k == "rewards") parse_rewards(c.rewards, item, p);
    else if (k == "embedding_dim") c.embedding_dim = static_cast<int>(get_count(item, p));
    else if (k == "max_keys") c.max_keys = get_count(item, p);
    else if (k == "output_dir") c.output_dir = get_string(item, p);
    else unknown(p);
  }

  if (strategy_multitask && slot_given) throw ConfigError("/strategy", "multitask fills every slot; drop admission/eviction/ttl");
  if (strategy_multitask) c.multitask = true;
  if (repetitions) {
    if (seeds_given && *repetitions != c.seeds.size()) throw ConfigError("/repetitions", "does not match the number of seeds");
    if (!seeds_given) {
      c.seeds.clear();
      for (std::uint64_t s = 1; s <= *repetitions; ++s) c.seeds.push_back(s);
    }
  }
  for (auto& w : c.phases) w.record_count = c.record_count;
  validate(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& c) {
  if (c.capacity == 0) throw ConfigError("/capacity", "must be positive");
  if (!(c.max_ttl > 0.0)) throw ConfigError("/max_ttl", "must be positive");
  if (!(c.fixed_ttl >= 0.0)) throw ConfigError("/fixed_ttl", "must be non-negative");
  if (!(c.cache_threshold >= 0.0)) throw ConfigError("/cache_threshold", "must be non-negative");
  if (c.record_count == 0) throw ConfigError("/record_count", "must be positive");
  if (c.window_size == 0) throw ConfigError("/window_size", "must be positive");
  if (!(c.ops_per_second > 0.0)) throw ConfigError("/ops_per_second", "must be positive");
  if (c.seeds.empty()) throw ConfigError("/seeds", "must not be empty");
  if (c.phases.empty()) throw ConfigError("/phases", "must not be empty");
  if (c.embedding_dim <= 0) throw ConfigError("/embedding_dim", "must be positive");
  if (c.max_keys == 0) throw ConfigError("/max_keys", "must be positive");
  if (!(c.latency.median > 0.0) || !(c.latency.sigma >= 0.0)) throw ConfigError("/latency", "median must be positive, sigma non-negative");
  if (c.dqn.batch_size == 0 || c.dqn.replay_capacity == 0 || c.dqn.sync_interval == 0) throw ConfigError("/dqn", "sizes must be positive");
  if (c.sac.batch_size == 0 || c.sac.replay_capacity == 0) throw ConfigError("/sac", "sizes must be positive");
  if (!kAdmission.count(c.admission)) throw ConfigError("/admission", "unknown strategy");
  if (!kEviction.count(c.eviction)) throw ConfigError("/eviction", "unknown strategy");
  if (!kTtl.count(c.ttl)) throw ConfigError("/ttl", "unknown strategy");
  for (std::size_t i = 0; i < c.phases.size(); ++i) {
    try {
      c.phases[i].validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("/phases/" + std::to_string(i), e.what());
    }
  }
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["name"] = c.name;
  if (c.multitask) {
    doc["strategy"] = "multitask";
  } else {
    doc["admission"] = c.admission;
    doc["eviction"] = c.eviction;
    doc["ttl"] = c.ttl;
  }
  doc["capacity"] = c.capacity;
  doc["max_ttl"] = c.max_ttl;
  doc["fixed_ttl"] = c.fixed_ttl;
  doc["cache_threshold"] = c.cache_threshold;
  doc["record_count"] = c.record_count;
  doc["window_size"] = c.window_size;
  json phases = json::array();
  for (const auto& w : c.phases) {
    phases.push_back({{"name", w.name}, {"read_fraction", w.read_fraction}, {"queries", w.query_count}, {"distribution", distribution_json(w.distribution)}});
  }
  doc["phases"] = std::move(phases);
  doc["seeds"] = c.seeds;
  doc["clock"] = c.clock == ClockMode::Virtual ? "virtual" : "wall";
  doc["ops_per_second"] = c.ops_per_second;
  doc["latency"] = {{"median", c.latency.median}, {"sigma", c.latency.sigma}};
  doc["dqn"] = {{"hidden", c.dqn.hidden},
                {"gamma", c.dqn.gamma},
                {"lr", c.dqn.lr},
                {"batch_size", c.dqn.batch_size},
                {"replay_capacity", c.dqn.replay_capacity},
                {"sync_interval", c.dqn.sync_interval},
                {"warmup", c.dqn.warmup},
                {"epsilon", {{"start", c.dqn.epsilon.start}, {"floor", c.dqn.epsilon.floor}, {"decay_steps", c.dqn.epsilon.decay_steps}}}};
  doc["sac"] = {{"hidden", c.sac.hidden},         {"gamma", c.sac.gamma},   {"lr", c.sac.lr},
                {"alpha", c.sac.alpha},           {"tau", c.sac.tau},       {"batch_size", c.sac.batch_size},
                {"replay_capacity", c.sac.replay_capacity}, {"warmup", c.sac.warmup}};
  doc["rewards"] = {{"scale_by_retrieval", c.rewards.scale_by_retrieval},
                    {"mean_retrieval", c.rewards.mean_retrieval},
                    {"scale_by_hit_density", c.rewards.scale_by_hit_density}};
  doc["embedding_dim"] = c.embedding_dim;
  doc["max_keys"] = c.max_keys;
  if (!c.output_dir.empty()) doc["output_dir"] = c.output_dir;
  return doc;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  json doc = to_json(config);
  doc.erase("output_dir");
  return fnv1a(doc.dump());
}

void apply_scale(ExperimentConfig& config, double scale) {
  if (!(scale > 0.0)) throw ConfigError("--scale", "must be positive");
  for (auto& w : config.phases) {
    w.query_count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(w.query_count) * scale)));
  }
}

}  // namespace rlcache
