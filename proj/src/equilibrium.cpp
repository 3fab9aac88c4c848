#include "oslab/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

namespace oslab {

namespace {

void check_lambda_q(double lambda, double q) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in (0,1)");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("q must be in (0,1]");
}

// 1 - (1-x)^(1/d) with full relative accuracy for tiny x, where naive pow
// cancels.
double one_minus_dth_root(double x, int d) {
  return -std::expm1(std::log1p(-x) / static_cast<double>(d));
}

}  // namespace

FixedPoint fixed_point(double lambda, int d, FixedPointOptions opts) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in (0,1)");
  if (d < 1) throw std::invalid_argument("d >= 1 required");

  std::vector<double> v{1.0};
  v.reserve(256);
  while (static_cast<int>(v.size()) <= opts.k_max) {
    // d = 1 collapses the root to the identity v_k = lambda v_{k-1}.
    double next = d == 1 ? lambda * v.back() : one_minus_dth_root(lambda * v.back(), d);
    if (!(next >= opts.floor_eps)) break;
    v.push_back(next);
  }

  FixedPoint fp;
  fp.v_star = tail_unchecked(std::move(v));
  fp.lambda = lambda;
  fp.d = d;
  fp.p = occupancy_pmf(fp.v_star);
  return fp;
}

double fixed_point_residual(const FixedPoint& fp) {
  double worst = 0.0;
  for (std::size_t k = 1; k < fp.v_star.size(); ++k) {
    double pred = 1.0 - std::pow(1.0 - fp.lambda * fp.v_star.entry(k - 1),
                                 1.0 / static_cast<double>(fp.d));
    worst = std::max(worst, std::abs(fp.v_star.entry(k) - pred));
  }
  return worst;
}

TailDiagnostics tail_ratios(const FixedPoint& fp, int k_range) {
  int computed = static_cast<int>(fp.v_star.size()) - 1;
  int k_top = k_range > 0 ? std::min(k_range, computed) : computed;

  TailDiagnostics diag;
  diag.truncated_early = k_range > 0 && computed < k_range;
  diag.c.resize(static_cast<std::size_t>(k_top) + 1);
  diag.c[0] = 1.0;
  double log_rate = std::log(fp.lambda) - std::log(static_cast<double>(fp.d));
  for (int k = 1; k <= k_top; ++k)
    diag.c[static_cast<std::size_t>(k)] = std::exp(std::log(fp.v_star.entry(k)) - k * log_rate);
  return diag;
}

BirthDeathEquilibrium bd_equilibrium(double lambda, double q, double mass_tol) {
  check_lambda_q(lambda, q);
  if (!(mass_tol > 0.0)) throw std::invalid_argument("mass_tol must be > 0");

  auto death_rate = [&](int64_t j) {
    // 1 - (1-q)^j; the expm1 form keeps accuracy for small q.
    if (q == 1.0) return 1.0;
    return -std::expm1(static_cast<double>(j) * std::log1p(-q));
  };

  std::vector<double> w{1.0};
  double norm = 1.0;
  double tail_bound = 0.0;
  for (int64_t j = 1;; ++j) {
    w.push_back(w.back() * lambda / death_rate(j));
    norm += w.back();
    // Weight ratios fall toward lambda as the death rate climbs to 1, so
    // lambda / death_rate(j+1) caps every later ratio and certifies a
    // geometric tail bound.
    double ratio_cap = lambda / death_rate(j + 1);
    if (ratio_cap < 1.0) {
      tail_bound = w.back() * ratio_cap / (1.0 - ratio_cap);
      if (tail_bound < mass_tol) break;
    }
  }

  BirthDeathEquilibrium eq;
  eq.lambda = lambda;
  eq.q = q;
  eq.truncation_mass = tail_bound;
  eq.pi.resize(w.size());
  double mean = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    eq.pi[j] = w[j] / norm;
    mean += static_cast<double>(j) * eq.pi[j];
  }
  eq.mean_occupancy = mean;
  return eq;
}

double delay_lcqd(double lambda, int d) {
  FixedPoint fp = fixed_point(lambda, d);
  return mean_occupancy(fp.v_star) / lambda;
}

double delay_lcq_normalized(double lambda, double q) {
  return bd_equilibrium(lambda, q).mean_occupancy / lambda;
}

}  // namespace oslab
