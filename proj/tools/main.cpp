// rlcache command line: run experiments, serve the HTTP facade, re-aggregate results.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rlcache/config.hpp"
#include "rlcache/errors.hpp"
#include "rlcache/experiment.hpp"
#include "rlcache/http_facade.hpp"

namespace {

std::string output_dir(const std::string& flag, const rlcache::ExperimentConfig* config) {
  if (!flag.empty()) return flag;
  if (config && !config->output_dir.empty()) return config->output_dir;
  if (const char* env = std::getenv("RLCACHE_OUTPUT_DIR"); env && *env) return env;
  return "results";
}

void print_summary(const nlohmann::json& summary) {
  for (const auto& p : summary.at("phases")) {
    const auto& m = p.at("metrics");
    std::printf("%-16s hit_rate %.4f (+-%.4f)  caching_rate %.4f  f1 %.4f  ttl_dev %.3f\n", p.at("phase").get<std::string>().c_str(),
                m.at("hit_rate").at("mean").get<double>(), m.at("hit_rate").at("std").get<double>(),
                m.at("caching_rate").at("mean").get<double>(), m.at("f1").at("mean").get<double>(),
                m.at("mean_ttl_deviation").at("mean").get<double>());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RL-driven cache manager laboratory"};
  app.require_subcommand(1);

  std::string config_path, out, seeds_csv, bind = "127.0.0.1:8080";
  double scale = 1.0;
  bool variance = false;

  auto* run = app.add_subcommand("run", "run an experiment and write windows.csv + summary.json");
  run->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", seeds_csv, "comma separated seeds, overrides the config");
  run->add_option("--scale", scale, "multiply every phase's query count")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "output directory (default: config, then $RLCACHE_OUTPUT_DIR, then ./results)");
  run->add_flag("--variance", variance, "also write variance.json (needs two or more seeds)");

  auto* serve = app.add_subcommand("serve", "serve the HTTP key-value facade");
  serve->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--seed", seeds_csv, "seed for the backend and agents");

  auto* report = app.add_subcommand("report", "re-aggregate windows.csv into summary.json");
  report->add_option("--out", out, "results directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      rlcache::ExperimentConfig config = rlcache::load_config(config_path);
      if (!seeds_csv.empty()) {
        config.seeds.clear();
        for (const auto& s : CLI::detail::split(seeds_csv, ',')) config.seeds.push_back(std::stoull(s));
      }
      if (scale != 1.0) rlcache::apply_scale(config, scale);
      const std::string dir = output_dir(out, &config);
      if (variance) {
        const auto report_json = rlcache::repeat_and_report(config, config.seeds, dir);
        std::printf("early hit-rate std %.4f, late %.4f\n", report_json.at("early_hit_rate_std").get<double>(),
                    report_json.at("late_hit_rate_std").get<double>());
        std::ifstream in(dir + "/summary.json");
        print_summary(nlohmann::json::parse(in));
      } else {
        print_summary(rlcache::run_experiment(config, dir).summary);
      }
      std::printf("results in %s\n", dir.c_str());
    } else if (serve->parsed()) {
      const rlcache::ExperimentConfig config = rlcache::load_config(config_path);
      const std::uint64_t seed = seeds_csv.empty() ? config.seeds.front() : std::stoull(seeds_csv);
      const auto [host, port] = rlcache::parse_bind_address(bind);
      rlcache::HttpFacade facade(config, seed);
      std::printf("serving on %s:%d\n", host.c_str(), port);
      std::fflush(stdout);
      facade.listen(host, port);
    } else if (report->parsed()) {
      const std::string dir = output_dir(out, nullptr);
      print_summary(rlcache::report_directory(dir));
    }
  } catch (const rlcache::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
