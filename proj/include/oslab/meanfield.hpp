#pragma once

#include <stdexcept>
#include <vector>

#include "oslab/params.hpp"
#include "oslab/tail.hpp"

namespace oslab {

struct IntegrateOptions {
  double dt = 1e-3;        // fixed RK4 step
  double record_dt = 0.1;  // trajectory recording granularity
  double mono_tol = 1e-9;  // monotonicity repair threshold; larger violations abort
  double range_tol = 1e-6; // abort if a component leaves [-range_tol, 1+range_tol]
  int margin = 4;          // truncation padding beyond ceil(lambda * t_end)
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FluidTrajectory {
  std::vector<double> times;
  std::vector<TailVector> states;
  PolicyKind policy = PolicyKind::LcqD;
  long monotonicity_repairs = 0;  // sub-tolerance violations snapped back

  const TailVector& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

// Right-hand side of the LCQ(d) limit dynamics
//   dv_k/dt = lambda (v_{k-1} - v_k) - (1 - v_{k+1})^d + (1 - v_k)^d
// over the support of v, with v_{K+1} = 0 closure.  Component 0 is 0.
std::vector<double> lcqd_rhs(const TailVector& v, double lambda, int d);

// Classical fixed-step RK4 on the truncated system.  The truncation level is
// padded by ceil(lambda * t_end): occupancy mass climbs at most one level per
// unit time at rate lambda, so leakage past the pad is negligible at any
// sane horizon.
FluidTrajectory integrate_lcqd(const TailVector& v0, double lambda, int d, double t_end,
                               IntegrateOptions opts = {});

// K(v) = min{k : v_j = 0 for all j >= k}; 1 for the drained tail.
int top_level(const TailVector& v);

// Piecewise LCQ fluid: below the top nonzero level mass moves up at rate
// lambda, the top level drains at rate 1 - lambda v (strictly negative), and
// levels at or above K(t) stay zero.  Each time the top level hits zero the
// crossing is located by bisection, K decrements, and the regime switches;
// integration stops once the tail is drained (K = 1).
std::vector<double> lcq_fluid_rhs(const TailVector& v, double lambda);
FluidTrajectory lcq_fluid_trajectory(const TailVector& v0, double lambda, double t_end,
                                     IntegrateOptions opts = {});

// Integrates the LCQ(d) dynamics from both initial states on a shared grid
// and reports whether the componentwise ordering v_plus >= v_minus holds at
// every recorded point (within mono_tol).
struct MonotonePairResult {
  bool ordered = false;
  double max_violation = 0.0;
};

MonotonePairResult monotone_pair_check(const TailVector& v_plus0, const TailVector& v_minus0,
                                       double lambda, int d, double t_end,
                                       IntegrateOptions opts = {});

}  // namespace oslab
