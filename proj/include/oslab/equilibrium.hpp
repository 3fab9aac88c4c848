#pragma once

#include <vector>

#include "oslab/tail.hpp"

namespace oslab {

// Stationary tail of the LCQ(d) limit dynamics, generated by
//   v*_0 = 1,   v*_k = 1 - (1 - lambda v*_{k-1})^(1/d).
struct FixedPoint {
  TailVector v_star;
  double lambda = 0.0;
  int d = 1;
  std::vector<double> p;  // occupancy pmf, p_k = v*_k - v*_{k+1}
};

struct FixedPointOptions {
  double floor_eps = 1e-300;  // stop once v*_k drops below this
  int k_max = 20000;
};

FixedPoint fixed_point(double lambda, int d, FixedPointOptions opts = {});

// max_k |v*_k - (1 - (1 - lambda v*_{k-1})^(1/d))| re-evaluated with plain
// pow, a different route than the construction uses.
double fixed_point_residual(const FixedPoint& fp);

// Ratios c_k = v*_k / (lambda/d)^k, the tail-decay diagnostics.  Computed in
// log space so deep levels do not underflow.  c[0] = 1.
struct TailDiagnostics {
  std::vector<double> c;
  bool truncated_early = false;  // v* hit the floor before k_range levels
};

// k_range = 0 means "all computed levels".
TailDiagnostics tail_ratios(const FixedPoint& fp, int k_range = 0);

// Stationary law of total LCQ occupancy in the large-n limit: birth-death
// chain with birth rate lambda and death rate 1 - (1-q)^j at state j.
struct BirthDeathEquilibrium {
  std::vector<double> pi;
  double lambda = 0.0;
  double q = 0.0;
  double mean_occupancy = 0.0;
  double truncation_mass = 0.0;  // certified unnormalized tail bound
};

BirthDeathEquilibrium bd_equilibrium(double lambda, double q, double mass_tol = 1e-13);

// Mean packet delay under LCQ(d) via Little's law: (sum_{k>=1} v*_k) / lambda,
// in time units where the packet transmission rate is n.
double delay_lcqd(double lambda, int d);

// n times the mean packet delay under LCQ: E_pi[J] / lambda.
double delay_lcq_normalized(double lambda, double q);

}  // namespace oslab
