#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace textswarm {

// Seeded random stream. The engine output sequence is fixed by the standard;
// all conversions to doubles and ranges are done here so that draws are
// bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // p <= 0 never fires, p >= 1 always fires.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform index in [0, n); n must be positive.
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Splits a root seed into independent per-entity streams. The result depends
// only on (root, stream, index), so adding entities never shifts the streams
// of existing ones.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index);

inline Rng make_stream(std::uint64_t root, std::string_view stream, std::uint64_t index) {
  return Rng(derive_seed(root, stream, index));
}

}  // namespace textswarm
