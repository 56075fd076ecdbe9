#pragma once

#include <stdexcept>
#include <string>

namespace resdeloc {

// A theorem-level identity or bound failed: exit code 2.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration; `path` names the offending field, e.g. "ladder.eta0".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace resdeloc
