#pragma once

#include <cstdint>
#include <random>

namespace htpg {

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; all conversions to real variates are done here
// rather than through <random> distributions, which are implementation
// defined. Streams are cheap to copy and a copy replays the same sequence.
class Stream {
 public:
  explicit Stream(std::uint64_t seed = 0);

  // Independent child stream keyed by `id`. Does not advance this stream.
  Stream split(std::uint64_t id) const;

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1); never returns an endpoint.
  double uniform_open();
  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();
  // Exponential with unit mean; consumes one uniform.
  double exponential();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace htpg
