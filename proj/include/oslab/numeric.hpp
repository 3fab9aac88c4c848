#pragma once

#include <cstdint>

namespace oslab {

// base^e for integer e >= 0 by binary exponentiation.
inline double ipow(double base, int64_t e) {
  double acc = 1.0;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

}  // namespace oslab
