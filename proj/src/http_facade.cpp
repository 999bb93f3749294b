#include "rlcache/http_facade.hpp"

#include <stdexcept>

#include "httplib.h"

namespace rlcache {

using nlohmann::json;

namespace {

json values_json(const ResultSet& values) {
  json out = json::array();
  for (const auto& [field, value] : values) out.push_back({field, value});
  return out;
}

// nullopt for anything that is not a well-formed values body.
std::optional<ResultSet> parse_values(const std::string& body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("values")) return std::nullopt;
  const json& v = doc["values"];
  ResultSet out;
  if (v.is_array()) {
    for (const auto& pair : v) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) return std::nullopt;
      out.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  } else if (v.is_object()) {
    for (const auto& [field, value] : v.items()) {
      if (!value.is_string()) return std::nullopt;
      out.emplace_back(field, value.get<std::string>());
    }
  } else {
    return std::nullopt;
  }
  return out;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json window_json(const WindowStats& w) {
  const PrecisionRecall prf = w.prf();
  return {{"phase", w.phase},         {"index", w.index},        {"requests", w.requests},
          {"hit_rate", w.hit_rate()}, {"caching_rate", w.caching_rate()}, {"f1", prf.f1},
          {"mean_ttl_deviation", w.mean_ttl_deviation()}, {"utilization", w.utilization}};
}

}  // namespace

HttpFacade::HttpFacade(const ExperimentConfig& config, std::uint64_t seed, const std::string& phase)
    : manager_(config, seed), server_(std::make_unique<httplib::Server>()) {
  manager_.begin_phase(phase);
  install_routes();
}

HttpFacade::~HttpFacade() { stop(); }

void HttpFacade::install_routes() {
  auto guarded = [this](auto handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard<std::mutex> lock(mutex_);
      try {
        handler(req, res);
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", e.what()}});
      }
    };
  };

  server_->Get(R"(/kv/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string key = req.matches[1];
    ReadResult r = manager_.read(key);
    if (!r.found) return send_json(res, 404, {{"error", "unknown key"}, {"key", key}});
    send_json(res, 200, {{"key", key}, {"hit", r.hit}, {"values", values_json(r.values)}});
  }));

  server_->Put(R"(/kv/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string key = req.matches[1];
    auto values = parse_values(req.body);
    if (!values) return send_json(res, 400, {{"error", "expected {\"values\": [[field, value], ...]}"}});
    manager_.write(key, std::move(*values));
    send_json(res, 200, {{"key", key}, {"cached", manager_.cache().contains(key)}});
  }));

  server_->Delete(R"(/kv/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string key = req.matches[1];
    manager_.remove(key);
    send_json(res, 200, {{"key", key}});
  }));

  server_->Get("/stats", guarded([this](const httplib::Request&, httplib::Response& res) {
    const MetricsLedger& ledger = manager_.ledger();
    const WindowStats totals = ledger.totals();
    json body = {{"request_count", manager_.requests()},
                 {"hit_rate", totals.hit_rate()},
                 {"caching_rate", totals.caching_rate()},
                 {"utilization", manager_.cache().utilization()},
                 {"resident", manager_.cache().size()},
                 {"virtual_time", manager_.now()},
                 {"windows", ledger.windows().size()}};
    if (!ledger.windows().empty()) body["current_window"] = window_json(ledger.windows().back());
    send_json(res, 200, body);
  }));
}

int HttpFacade::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound <= 0) throw std::runtime_error("cannot bind " + host);
  } else if (!server_->bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpFacade::listen(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  server_->listen_after_bind();
}

void HttpFacade::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

json HttpFacade::stats() {
  std::lock_guard<std::mutex> lock(mutex_);
  const WindowStats totals = manager_.ledger().totals();
  return {{"request_count", manager_.requests()}, {"hit_rate", totals.hit_rate()}};
}

void HttpFacade::finish() {
  std::lock_guard<std::mutex> lock(mutex_);
  manager_.finish();
}

void HttpFacade::with_manager(const std::function<void(CacheManager&)>& fn) {
  std::lock_guard<std::mutex> lock(mutex_);
  fn(manager_);
}

std::pair<std::string, int> parse_bind_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw std::invalid_argument("bind address must look like host:port");
  }
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(address.substr(colon + 1), &used);
    if (used != address.size() - colon - 1) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad port in bind address '" + address + "'");
  }
  if (port < 0 || port > 65535) throw std::invalid_argument("port out of range in '" + address + "'");
  return {address.substr(0, colon), port};
}

}  // namespace rlcache
