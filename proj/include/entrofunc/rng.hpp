#pragma once

#include <cstdint>

namespace entrofunc {

// SplitMix64: 64-bit state advanced by a fixed odd constant, output run
// through a bijective avalanche mix. Deterministic across platforms, cheap
// to seed, and safe to derive independent streams from xor'd seeds, which
// is how the replication harness splits it.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Standard normal via the Marsaglia polar transform; generates pairs and
  // caches the spare deviate.
  double normal();

  // Inverse-CDF exponential with the given rate.
  double exponential(double rate);

  // Threshold Bernoulli: 1 with probability p.
  int bernoulli(double p);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace entrofunc
