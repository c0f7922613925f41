#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace textswarm {

// Raised when a caller violates an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A description (or query) that tokenizes to nothing.
class EmptyDescription : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyCluster : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid configuration; carries every offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::vector<std::string> keys, const std::string& detail);

  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

// A remote provider failed or answered with something unusable.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace textswarm
