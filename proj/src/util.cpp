#include <cstdio>
#include <limits>
#include <sstream>

#include "textswarm/errors.hpp"
#include "textswarm/hashing.hpp"
#include "textswarm/rng.hpp"

namespace textswarm {

namespace {
std::string join_keys(const std::vector<std::string>& keys) {
  std::ostringstream out;
  for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? ", " : "") << keys[i];
  return out.str();
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> keys, const std::string& detail)
    : std::invalid_argument("invalid configuration [" + join_keys(keys) + "]: " + detail),
      keys_(std::move(keys)) {}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw ContractError("Rng::below requires n > 0");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Reject the tail that would bias the modulo.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index) {
  std::uint64_t h = fmix64(fnv1a64(stream) ^ fmix64(root + 0x9e3779b97f4a7c15ULL));
  h = fmix64(h + 0x9e3779b97f4a7c15ULL * (index + 1));
  return h;
}

}  // namespace textswarm
