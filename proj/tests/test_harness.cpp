#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rlcache/config.hpp"
#include "rlcache/errors.hpp"
#include "rlcache/experiment.hpp"
#include "rlcache/http_facade.hpp"
#include "rlcache/manager.hpp"
#include "support.hpp"
// last: <resolv.h> defines a _res macro that breaks Eigen headers
#include "httplib.h"

using namespace rlcache;
using testing::values;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rlcache_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small(const std::string& admission = "write_through") {
  ExperimentConfig c;
  c.admission = admission;
  c.record_count = 500;
  c.capacity = 100;
  c.window_size = 500;
  WorkloadSpec w = workload_preset("read_dominant");
  w.query_count = 3000;
  c.phases = {w};
  c.dqn.warmup = 64;
  return c;
}

}  // namespace

TEST_CASE("config defaults") {
  const auto c = parse_config_text("{}");
  CHECK(c.admission == "write_through");
  CHECK(c.eviction == "lru");
  CHECK(c.ttl == "fixed_ttl");
  CHECK_FALSE(c.multitask);
  CHECK(c.capacity == 5000);
  CHECK(c.max_ttl == 120.0);
  CHECK(c.fixed_ttl == 60.0);
  CHECK(c.window_size == 1000);
  CHECK(c.record_count == 10000);
  REQUIRE(c.phases.size() == 1);
  CHECK(c.phases[0].name == "read_mostly");
  CHECK(c.seeds == std::vector<std::uint64_t>{1});
  CHECK(c.dqn.epsilon.decay_steps == 50000);
  CHECK_FALSE(c.uses_rl());
}

TEST_CASE("config errors name the offending path") {
  auto path_of = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("<no error>");
  };
  CHECK(path_of(R"({"strategy": "multitask", "eviction": "lru"})") == "/strategy");
  CHECK(path_of(R"({"capacity": 0})") == "/capacity");
  CHECK(path_of(R"({"bogus": 1})") == "/bogus");
  CHECK(path_of(R"({"dqn": {"epsilon": {"decay": 5}}})") == "/dqn/epsilon/decay");
  CHECK(path_of(R"({"admission": "lfu"})") == "/admission");
  CHECK(path_of(R"({"phases": [{"read_fraction": 2.0}]})") == "/phases/0");
  CHECK(path_of(R"({"seeds": [1, 2], "repetitions": 3})") == "/repetitions");
  CHECK(path_of("{not json") == "");
  CHECK_THROWS_AS(load_config("/nonexistent/rlcache.json"), ConfigError);
  CHECK_THROWS_AS(config_preset("nope"), ConfigError);
}

TEST_CASE("property: to_json round-trips every preset and a custom config") {
  std::vector<ExperimentConfig> configs;
  for (const auto& name : config_preset_names()) configs.push_back(config_preset(name));
  configs.push_back(parse_config_text(R"({"strategy": "multitask", "capacity": 77, "repetitions": 4,
      "phases": [{"name": "p", "read_fraction": 0.3, "queries": 12, "distribution": {"kind": "zipfian", "theta": 0.5}}],
      "sac": {"alpha": 0.05}, "rewards": {"scale_by_retrieval": true}})"));
  for (const auto& c : configs) {
    const auto back = parse_config(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));
  }
  CHECK(configs.back().multitask);
  CHECK(configs.back().seeds == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(config_hash(configs[0]) != config_hash(configs[1]));
  CHECK(config_preset("full_scale").phases.size() == 5);
  CHECK(config_preset("full_scale").phases[0].query_count == 100000);

  auto scaled = config_preset("five_phase");
  apply_scale(scaled, 0.001);
  CHECK(scaled.phases[0].query_count == 10);
}

TEST_CASE("manager: reads, writes, removal") {
  ExperimentConfig c = small();
  CacheManager m(c, 1);
  CHECK_FALSE(m.read("missing").found);
  CHECK(m.requests() == 0);

  auto r = m.read("user3");
  CHECK(r.found);
  CHECK_FALSE(r.hit);
  CHECK(r.values.size() == 10);
  CHECK(m.read("user3").hit);

  m.write("user3", values("new"));
  r = m.read("user3");
  CHECK(r.hit);  // write-through
  CHECK(r.values == values("new"));
  m.remove("user3");
  CHECK_FALSE(m.read("user3").hit);
  CHECK(m.requests() == 6);
  CHECK(m.now() == doctest::Approx(6 / c.ops_per_second));
}

TEST_CASE("two phases of 10k requests give 20 windows") {
  ExperimentConfig c;
  c.record_count = 1000;
  c.capacity = 200;
  WorkloadSpec a = workload_preset("read_mostly"), b = workload_preset("write_heavy");
  a.query_count = b.query_count = 10000;
  c.phases = {a, b};
  const SeedRun run = run_seed(c, 2);
  REQUIRE(run.windows.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(run.windows[i].requests == 1000);
    CHECK(run.windows[i].phase == (i < 10 ? "read_mostly" : "write_heavy"));
  }
  CHECK(run.windows[15].hit_rate() == 0.0);
  CHECK(run.windows[5].hit_rate() > 0.0);
}

TEST_CASE("same config and seeds give a byte-identical windows.csv") {
  ExperimentConfig c = small("rl_admission");
  c.eviction = "rl_eviction";
  c.seeds = {1, 2};
  const auto d1 = scratch("csv1"), d2 = scratch("csv2");
  run_experiment(c, d1.string());
  run_experiment(c, d2.string());
  const std::string a = slurp(d1 / "windows.csv");
  CHECK(a.size() > 100);
  CHECK(a == slurp(d2 / "windows.csv"));
  CHECK(fs::exists(d1 / "summary.json"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("report re-aggregates the csv") {
  ExperimentConfig c = small();
  c.seeds = {1, 2, 3};
  const auto dir = scratch("report");
  const auto result = run_experiment(c, dir.string());
  fs::remove(dir / "summary.json");
  const auto again = report_directory(dir.string());
  const auto& m1 = result.summary.at("phases").at(0).at("metrics");
  const auto& m2 = again.at("phases").at(0).at("metrics");
  for (const auto& name : kMetricNames) {
    CAPTURE(name);
    CHECK(m2.at(name).at("mean").get<double>() == doctest::Approx(m1.at(name).at("mean").get<double>()).epsilon(1e-5));
  }
  CHECK(again.at("phases").at(0).at("repetitions") == 3);
  CHECK(fs::exists(dir / "summary.json"));

  std::ofstream(dir / "windows.csv") << "wrong,header\n";
  CHECK_THROWS(report_directory(dir.string()));
  fs::remove_all(dir);
  CHECK_THROWS(report_directory(dir.string()));
}

TEST_CASE("repeat_and_report") {
  ExperimentConfig c = small();
  CHECK_THROWS_AS(repeat_and_report(c, {1}), std::invalid_argument);
  const auto same = repeat_and_report(c, {4, 4});
  CHECK(same.at("early_hit_rate_std").get<double>() == 0.0);
  CHECK(same.at("late_hit_rate_std").get<double>() == 0.0);
  CHECK(same.at("windows") == 6);
  const auto diff = repeat_and_report(c, {4, 5});
  CHECK(diff.at("per_window").size() == 6);
}

TEST_CASE("http facade") {
  ExperimentConfig c = small();
  HttpFacade facade(c, 1);
  const int port = facade.start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);

  auto res = client.Get("/kv/nosuch");
  REQUIRE(res);
  CHECK(res->status == 404);

  res = client.Put("/kv/user7", R"({"values": [["field0", "abc"]]})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = client.Get("/kv/user7");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto body = nlohmann::json::parse(res->body);
  CHECK(body.at("hit") == true);
  CHECK(body.at("values").at(0).at(1) == "abc");

  res = client.Put("/kv/user7", "not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  for (int i = 0; i < 98; ++i) client.Get(("/kv/user" + std::to_string(i)).c_str());
  res = client.Get("/stats");
  REQUIRE(res);
  const auto stats = nlohmann::json::parse(res->body);
  CHECK(stats.at("request_count") == 100);
  CHECK(facade.stats().at("request_count") == 100);
  facade.stop();
}

TEST_CASE("parse_bind_address") {
  CHECK(parse_bind_address("0.0.0.0:8080") == std::pair<std::string, int>{"0.0.0.0", 8080});
  CHECK(parse_bind_address("localhost:0").second == 0);
  for (const char* bad : {"nohost", ":80", "host:", "host:70000", "host:8x", "host:-1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_bind_address(bad), std::invalid_argument);
  }
}
