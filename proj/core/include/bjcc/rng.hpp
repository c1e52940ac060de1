#pragma once

#include <cstdint>

namespace bjcc {

struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

// SplitMix64 finalizer: a bijective 64-bit mixing function.
std::uint64_t mix64(std::uint64_t x);

// Combine a base seed with a tuple of integer coordinates so that every
// coordinate tuple maps to an unrelated, stable child seed.
Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b = 0);

// Counter-based generator. Output i of stream (seed, stream) is
// mix64(key + (i + 1) * 0x9E3779B97F4A7C15), key = mix64(seed ^ mix64(stream)).
// The stream is fully determined by (seed, stream, number of draws so far);
// no global state is involved.
class Rng {
public:
  explicit Rng(Seed seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on (0, 1); never returns 0 or 1.
  double uniform();

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Exponential with the given rate.
  double exponential(double rate);

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

} // namespace bjcc
