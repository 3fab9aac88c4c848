#include "oslab/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oslab/numeric.hpp"

namespace oslab {

namespace {

using Vec = std::vector<double>;

// dv_k = lambda (v_{k-1} - v_k) - (1 - v_{k+1})^d + (1 - v_k)^d for
// 1 <= k < len, closure v_len = 0.  Stage states may poke slightly outside
// [0,1]; the RHS is polynomial, so that is harmless.
void lcqd_rhs_into(const Vec& v, double lambda, int d, Vec& pw, Vec& out) {
  std::size_t len = v.size();
  pw.resize(len + 1);
  for (std::size_t k = 0; k < len; ++k) pw[k] = ipow(1.0 - v[k], d);
  pw[len] = 1.0;
  out.resize(len);
  out[0] = 0.0;
  for (std::size_t k = 1; k < len; ++k)
    out[k] = lambda * (v[k - 1] - v[k]) - pw[k + 1] + pw[k];
}

// Piecewise LCQ regime for current top level K: mass below the top moves up
// at rate lambda, the top level drains toward zero, frozen above.
void lcq_rhs_into(const Vec& v, double lambda, int top, Vec& out) {
  out.assign(v.size(), 0.0);
  for (int k = 1; k + 1 < top; ++k) out[k] = lambda * (v[k - 1] - v[k]);
  if (top >= 2) out[top - 1] = lambda * v[top - 2] - 1.0;
}

class Stepper {
 public:
  Stepper(double lambda, int d, bool lcq, const IntegrateOptions& opts)
      : lambda_(lambda), d_(d), lcq_(lcq), opts_(opts) {}

  // One classical RK4 step of size h from v into out.  top is the LCQ regime
  // level; ignored for the LCQ(d) dynamics.
  void step(const Vec& v, double h, int top, Vec& out) {
    rhs(v, top, k1_);
    axpy(v, h / 2, k1_, tmp_);
    rhs(tmp_, top, k2_);
    axpy(v, h / 2, k2_, tmp_);
    rhs(tmp_, top, k3_);
    axpy(v, h, k3_, tmp_);
    rhs(tmp_, top, k4_);
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = v[i] + h / 6 * (k1_[i] + 2 * k2_[i] + 2 * k3_[i] + k4_[i]);
  }

  // Range check, clamp to [0,1], and monotonicity repair.  Returns the number
  // of snapped entries; throws on violations past the configured tolerances.
  long repair(Vec& v, double t) const {
    long snapped = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] < -opts_.range_tol || v[k] > 1.0 + opts_.range_tol)
        throw IntegrationError("step-size failure: v_" + std::to_string(k) + " = " +
                               std::to_string(v[k]) + " at t = " + std::to_string(t));
      v[k] = std::clamp(v[k], 0.0, 1.0);
    }
    v[0] = 1.0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k] > v[k - 1]) {
        double viol = v[k] - v[k - 1];
        if (viol > opts_.mono_tol)
          throw IntegrationError("monotonicity violation " + std::to_string(viol) + " at k = " +
                                 std::to_string(k) + ", t = " + std::to_string(t));
        v[k] = v[k - 1];
        ++snapped;
      }
    }
    return snapped;
  }

 private:
  void rhs(const Vec& v, int top, Vec& out) {
    if (lcq_)
      lcq_rhs_into(v, lambda_, top, out);
    else
      lcqd_rhs_into(v, lambda_, d_, pw_, out);
  }

  static void axpy(const Vec& v, double h, const Vec& k, Vec& out) {
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] + h * k[i];
  }

  double lambda_;
  int d_;
  bool lcq_;
  const IntegrateOptions& opts_;
  Vec k1_, k2_, k3_, k4_, tmp_, pw_;
};

void record(FluidTrajectory& traj, double t, const Vec& v) {
  traj.times.push_back(t);
  traj.states.push_back(tail_unchecked(v));
}

void check_integrate_args(double lambda, double t_end, const IntegrateOptions& opts) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in [0,1)");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  if (!(opts.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(opts.record_dt > 0.0)) throw std::invalid_argument("record_dt must be > 0");
}

FluidTrajectory integrate_lcqd_padded(const TailVector& v0, double lambda, int d, double t_end,
                                      std::size_t work_len, const IntegrateOptions& opts) {
  Vec v(work_len, 0.0);
  for (std::size_t k = 0; k < v0.size(); ++k) v[k] = v0.entry(k);

  FluidTrajectory traj;
  traj.policy = PolicyKind::LcqD;
  record(traj, 0.0, v);

  Stepper stepper(lambda, d, false, opts);
  Vec next;
  auto n_steps = static_cast<long>(std::ceil(t_end / opts.dt - 1e-12));
  double next_record = opts.record_dt;
  for (long i = 1; i <= n_steps; ++i) {
    double t_prev = (i - 1) * opts.dt;
    double t = std::min(i * opts.dt, t_end);
    stepper.step(v, t - t_prev, 0, next);
    v.swap(next);
    traj.monotonicity_repairs += stepper.repair(v, t);
    if (t + 1e-12 >= next_record || i == n_steps) {
      record(traj, t, v);
      while (next_record <= t + 1e-12) next_record += opts.record_dt;
    }
  }
  if (traj.times.back() < t_end) record(traj, t_end, v);
  return traj;
}

}  // namespace

std::vector<double> lcqd_rhs(const TailVector& v, double lambda, int d) {
  if (d < 1) throw std::invalid_argument("d >= 1 required");
  Vec pw, out;
  lcqd_rhs_into(v.entries(), lambda, d, pw, out);
  return out;
}

FluidTrajectory integrate_lcqd(const TailVector& v0, double lambda, int d, double t_end,
                               IntegrateOptions opts) {
  check_integrate_args(lambda, t_end, opts);
  if (d < 1) throw std::invalid_argument("d >= 1 required");
  std::size_t work_len =
      v0.size() + static_cast<std::size_t>(std::ceil(lambda * t_end)) + opts.margin;
  return integrate_lcqd_padded(v0, lambda, d, t_end, work_len, opts);
}

int top_level(const TailVector& v) {
  for (std::size_t k = v.size(); k-- > 1;)
    if (v.entry(k) > 0.0) return static_cast<int>(k) + 1;
  return 1;
}

std::vector<double> lcq_fluid_rhs(const TailVector& v, double lambda) {
  Vec out;
  lcq_rhs_into(v.entries(), lambda, top_level(v), out);
  return out;
}

FluidTrajectory lcq_fluid_trajectory(const TailVector& v0, double lambda, double t_end,
                                     IntegrateOptions opts) {
  check_integrate_args(lambda, t_end, opts);

  Vec v = v0.entries();
  int top = top_level(v0);

  FluidTrajectory traj;
  traj.policy = PolicyKind::Lcq;
  record(traj, 0.0, v);

  Stepper stepper(lambda, 0, true, opts);
  Vec next, trial;
  double t = 0.0;
  double next_record = opts.record_dt;
  constexpr double kCrossingTol = 1e-10;  // bisection accuracy on event times
  constexpr double kZeroSnap = 1e-12;

  while (top > 1 && t < t_end) {
    double h = std::min(opts.dt, t_end - t);
    stepper.step(v, h, top, next);

    if (next[top - 1] <= 0.0) {
      // The top level crossed zero inside this step; locate the crossing.
      double lo = 0.0, hi = h;
      while (hi - lo > kCrossingTol) {
        double mid = (lo + hi) / 2;
        stepper.step(v, mid, top, trial);
        (trial[top - 1] > 0.0 ? lo : hi) = mid;
      }
      stepper.step(v, hi, top, next);
      t += hi;
      v.swap(next);
      traj.monotonicity_repairs += stepper.repair(v, t);
      while (top > 1 && v[top - 1] <= kZeroSnap) {
        v[top - 1] = 0.0;
        --top;
      }
      record(traj, t, v);
      while (next_record <= t + 1e-12) next_record += opts.record_dt;
      continue;
    }

    t += h;
    v.swap(next);
    traj.monotonicity_repairs += stepper.repair(v, t);
    if (t + 1e-12 >= next_record) {
      record(traj, t, v);
      while (next_record <= t + 1e-12) next_record += opts.record_dt;
    }
  }

  if (traj.times.back() < t) record(traj, t, v);
  if (t < t_end) record(traj, t_end, v);  // drained; constant from here on
  return traj;
}

MonotonePairResult monotone_pair_check(const TailVector& v_plus0, const TailVector& v_minus0,
                                       double lambda, int d, double t_end,
                                       IntegrateOptions opts) {
  std::size_t kmax = std::max(v_plus0.size(), v_minus0.size());
  for (std::size_t k = 0; k < kmax; ++k)
    if (v_plus0.entry(k) < v_minus0.entry(k))
      throw std::invalid_argument("initial states not ordered at k=" + std::to_string(k));

  check_integrate_args(lambda, t_end, opts);
  if (d < 1) throw std::invalid_argument("d >= 1 required");
  std::size_t work_len = kmax + static_cast<std::size_t>(std::ceil(lambda * t_end)) + opts.margin;
  FluidTrajectory plus = integrate_lcqd_padded(v_plus0, lambda, d, t_end, work_len, opts);
  FluidTrajectory minus = integrate_lcqd_padded(v_minus0, lambda, d, t_end, work_len, opts);

  MonotonePairResult result;
  for (std::size_t i = 0; i < plus.states.size(); ++i) {
    const auto& vp = plus.states[i];
    const auto& vm = minus.states[i];
    for (std::size_t k = 0; k < work_len; ++k)
      result.max_violation = std::max(result.max_violation, vm.entry(k) - vp.entry(k));
  }
  result.ordered = result.max_violation <= opts.mono_tol;
  return result;
}

}  // namespace oslab
