#pragma once

#include <stdexcept>
#include <string>

namespace rlcache {

// A caller broke an operation's documented precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the replay buffer when asked for more samples than it holds.
class NotReadyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error("config error at " + (path.empty() ? std::string("/") : path) + ": " + message),
        path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace rlcache
