#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "rlcache/backend.hpp"
#include "rlcache/workload.hpp"

using namespace rlcache;

namespace {

bool within_3_sigma(double count, double n, double p) { return std::abs(count - n * p) <= 3.0 * std::sqrt(n * p * (1 - p)); }

// Upper-tail p-value of Pearson's statistic against an analytic pmf.
double chi_square_p(const std::vector<double>& observed, const std::vector<double>& pmf, double n) {
  double stat = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const double expected = n * pmf[i];
    stat += (observed[i] - expected) * (observed[i] - expected) / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(pmf.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

WorkloadSpec spec_of(double read_fraction, std::size_t records, std::size_t queries, Distribution d = {}) {
  WorkloadSpec s;
  s.read_fraction = read_fraction;
  s.record_count = records;
  s.query_count = queries;
  s.distribution = d;
  return s;
}

}  // namespace

TEST_CASE("load phase") {
  Backend a(1), b(1);
  CHECK(load_phase(10000, 5, a) == 10000);
  CHECK(a.size() == 10000);
  CHECK(a.contains("user9999"));
  CHECK_FALSE(a.contains("user10000"));
  load_phase(10000, 5, b);
  for (int i = 0; i < 10000; i += 333) CHECK(a.read(record_key(i)).values == b.read(record_key(i)).values);
  const auto rec = a.read("user0").values;
  CHECK(rec.size() == 10);
  for (const auto& [field, value] : rec) CHECK(value.size() == 100);

  Backend one;
  load_phase(1, 5, one);
  CHECK(one.size() == 1);
  CHECK(one.contains("user0"));
}

TEST_CASE("zipf: theta 0 is uniform, n=2 theta=1 is 2/3 : 1/3") {
  Rng rng(1);
  ZipfSampler uni(10, 0.0);
  std::vector<double> counts(10, 0.0);
  for (int i = 0; i < 30000; ++i) counts[uni.sample(rng)] += 1;
  for (double c : counts) CHECK(within_3_sigma(c, 30000, 0.1));

  ZipfSampler two(2, 1.0);
  CHECK(two.pmf(0) == doctest::Approx(2.0 / 3.0));
  int zeros = 0;
  for (int i = 0; i < 30000; ++i) zeros += two.sample(rng) == 0;
  CHECK(within_3_sigma(zeros, 30000, 2.0 / 3.0));

  CHECK_THROWS_AS(ZipfSampler(0, 0.99), std::invalid_argument);
}

TEST_CASE("zipf n=100 theta=0.99 passes a chi-square test against the harmonic pmf") {
  const std::size_t n = 100;
  const double theta = 0.99;
  double h = 0.0;
  for (std::size_t i = 1; i <= n; ++i) h += 1.0 / std::pow(static_cast<double>(i), theta);
  std::vector<double> pmf(n);
  for (std::size_t i = 0; i < n; ++i) pmf[i] = 1.0 / std::pow(static_cast<double>(i + 1), theta) / h;

  ZipfSampler z(n, theta);
  for (std::size_t i = 0; i < n; ++i) CHECK(z.pmf(i) == doctest::Approx(pmf[i]).epsilon(1e-12));
  Rng rng(2);
  const int draws = 100000;
  std::vector<double> observed(n, 0.0);
  for (int i = 0; i < draws; ++i) observed[z.sample(rng)] += 1;
  CHECK(chi_square_p(observed, pmf, draws) > 0.01);
}

TEST_CASE("operation mix extremes") {
  WorkloadGenerator reads(spec_of(1.0, 100, 1000), 1);
  while (!reads.done()) {
    const auto op = reads.next();
    CHECK(op.kind == OpType::Read);
    CHECK(op.values.empty());
  }
  WorkloadGenerator writes(workload_preset("write_heavy"), 1);
  for (int i = 0; i < 1000; ++i) {
    const auto op = writes.next();
    CHECK(op.kind == OpType::Write);
    CHECK_FALSE(op.values.empty());
  }
}

TEST_CASE("hotspot 20/80 sends 80% of operations to the first 20% of keys") {
  WorkloadGenerator g(spec_of(0.5, 10000, 50000), 3);
  int hot = 0;
  while (!g.done()) {
    const auto op = g.next();
    hot += std::stoul(op.key.substr(4)) < 2000;
  }
  CHECK(std::abs(hot / 50000.0 - 0.8) <= 0.02);
}

TEST_CASE("property: read/write ratio within 1% over 20k operations") {
  for (const auto& name : workload_preset_names()) {
    WorkloadSpec s = workload_preset(name);
    s.query_count = 20000;
    WorkloadGenerator g(s, 9);
    int reads = 0;
    while (!g.done()) reads += g.next().kind == OpType::Read;
    CAPTURE(name);
    CHECK(std::abs(reads / 20000.0 - s.read_fraction) <= 0.01);
  }
}

TEST_CASE("presets match the five read/write rows") {
  const std::map<std::string, double> want{
      {"read_only", 1.0}, {"read_mostly", 0.95}, {"read_dominant", 0.75}, {"mix", 0.5}, {"write_heavy", 0.0}};
  CHECK(workload_preset_names().size() == 5);
  for (const auto& [name, frac] : want) {
    CHECK(workload_preset(name).read_fraction == frac);
    CHECK(workload_preset(name).name == name);
  }
  CHECK_THROWS_AS(workload_preset("scan_heavy"), std::invalid_argument);
}

TEST_CASE("property: a phase emits exactly query_count operations, deterministically") {
  WorkloadSpec s = spec_of(0.75, 500, 1234);
  WorkloadGenerator a(s, 42), b(s, 42), c(s, 43);
  std::size_t n = 0;
  bool differs = false;
  while (!a.done()) {
    const auto x = a.next(), y = b.next(), z = c.next();
    CHECK(x.key == y.key);
    CHECK(x.kind == y.kind);
    CHECK(x.values == y.values);
    differs = differs || x.key != z.key;
    ++n;
  }
  CHECK(n == 1234);
  CHECK(b.done());
  CHECK(differs);
}

TEST_CASE("periodic workload rewrites every key once per period") {
  Distribution d;
  d.kind = DistributionKind::Periodic;
  d.period = 40.0;
  WorkloadGenerator g(spec_of(0.9, 50, 12000, d), 1, 100.0);  // period = 4000 ops
  std::map<std::string, std::vector<std::uint64_t>> writes;
  while (!g.done()) {
    const auto op = g.next();
    if (op.kind == OpType::Write) writes[op.key].push_back(op.step);
  }
  CHECK(writes.size() == 50);
  for (const auto& [key, steps] : writes) {
    REQUIRE(steps.size() == 3);
    CHECK(steps[1] - steps[0] == 4000);
    CHECK(steps[2] - steps[1] == 4000);
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(spec_of(1.5, 10, 10).validate(), std::invalid_argument);
  CHECK_THROWS_AS(spec_of(0.5, 0, 10).validate(), std::invalid_argument);
  CHECK_THROWS_AS(spec_of(0.5, 10, 0).validate(), std::invalid_argument);
  Distribution bad;
  bad.hot_fraction = 1.0;
  CHECK_THROWS_AS(spec_of(0.5, 10, 10, bad).validate(), std::invalid_argument);
  CHECK(distribution_from_string("zipfian") == DistributionKind::Zipfian);
  CHECK_THROWS_AS(distribution_from_string("latest"), std::invalid_argument);
}
