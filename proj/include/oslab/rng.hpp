#pragma once

#include <cstdint>
#include <random>

namespace oslab {

// SplitMix64 finisher; replica i of a sweep runs with seed ^ splitmix64(i).
uint64_t splitmix64(uint64_t x);

// Deterministic draw stream for one simulation run.  All randomness a run
// consumes flows through a single stream in a fixed order, so a RunConfig
// (including its seed) pins the result bit-for-bit.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double exponential(double rate);
  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform on {0, ..., n-1}, debiased.
  int64_t uniform_index(int64_t n);

  int64_t binomial(int64_t n, double p);

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace oslab
