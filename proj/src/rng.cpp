#include "oslab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace oslab {

uint64_t splitmix64(uint64_t x) {
  uint64_t z = x + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double RandomStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be > 0");
  return -std::log1p(-uniform01()) / rate;
}

int64_t RandomStream::uniform_index(int64_t n) {
  if (n <= 0) throw std::invalid_argument("uniform_index needs n >= 1");
  auto un = static_cast<uint64_t>(n);
  // Lemire multiply-shift with rejection of the biased low range.
  uint64_t x = eng_();
  __uint128_t m = static_cast<__uint128_t>(x) * un;
  auto lo = static_cast<uint64_t>(m);
  if (lo < un) {
    uint64_t threshold = (0 - un) % un;
    while (lo < threshold) {
      x = eng_();
      m = static_cast<__uint128_t>(x) * un;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<int64_t>(m >> 64);
}

int64_t RandomStream::binomial(int64_t n, double p) {
  std::binomial_distribution<int64_t> dist(n, p);
  return dist(eng_);
}

}  // namespace oslab
