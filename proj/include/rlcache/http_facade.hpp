#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "json.hpp"
#include "rlcache/config.hpp"
#include "rlcache/manager.hpp"

namespace httplib {
class Server;
}

namespace rlcache {

// REST front for one CacheManager:
//   GET    /kv/{key}  cache-then-backend read  -> {"key", "hit", "values"}; 404 for unknown keys
//   PUT    /kv/{key}  write + invalidation      body {"values": [[field, value], ...]} or {"values": {field: value}}
//   DELETE /kv/{key}  invalidate
//   GET    /stats     current window and run totals
// Requests are handled one at a time under a mutex.
class HttpFacade {
 public:
  HttpFacade(const ExperimentConfig& config, std::uint64_t seed, const std::string& phase = "http");
  ~HttpFacade();
  HttpFacade(const HttpFacade&) = delete;
  HttpFacade& operator=(const HttpFacade&) = delete;

  // Binds (port 0 picks a free port), serves on a background thread and
  // returns the bound port. Throws std::runtime_error if binding fails.
  int start(const std::string& host, int port);
  // Binds and serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  nlohmann::json stats();
  // Closes the manager's ledger; later requests open fresh windows.
  void finish();
  // Runs fn with exclusive access to the manager.
  void with_manager(const std::function<void(CacheManager&)>& fn);

 private:
  void install_routes();

  std::mutex mutex_;
  CacheManager manager_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

// "host:port" -> (host, port). Throws std::invalid_argument when malformed.
std::pair<std::string, int> parse_bind_address(const std::string& address);

}  // namespace rlcache
