#include "oslab/tail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oslab {

TailVector TailVector::from_entries(std::vector<double> entries, double mono_tol) {
  if (entries.empty()) throw std::invalid_argument("tail must have at least entry u_0");
  if (entries[0] != 1.0) throw std::invalid_argument("u_0 must equal 1");
  for (std::size_t k = 1; k < entries.size(); ++k) {
    double& u = entries[k];
    if (!std::isfinite(u)) throw std::invalid_argument("tail entries must be finite");
    if (u < -mono_tol || u > 1.0 + mono_tol)
      throw std::invalid_argument("tail entry " + std::to_string(k) + " outside [0,1]: " +
                                  std::to_string(u));
    u = std::clamp(u, 0.0, 1.0);
    if (u > entries[k - 1]) {
      if (u - entries[k - 1] > mono_tol)
        throw std::invalid_argument("tail not nonincreasing at k=" + std::to_string(k));
      u = entries[k - 1];
    }
  }
  return TailVector(std::move(entries), Unchecked{});
}

TailVector tail_unchecked(std::vector<double> e) {
  return TailVector(std::move(e), TailVector::Unchecked{});
}

TailVector tail_from_counts(const CountTail& c, int64_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (c.m.empty() || c.m[0] != n) throw std::invalid_argument("m_0 must equal n");
  std::vector<double> u(c.m.size());
  u[0] = 1.0;
  for (std::size_t k = 1; k < c.m.size(); ++k) {
    if (c.m[k] < 0 || c.m[k] > c.m[k - 1])
      throw std::invalid_argument("counts not nonincreasing at k=" + std::to_string(k));
    u[k] = static_cast<double>(c.m[k]) / static_cast<double>(n);
  }
  return tail_unchecked(std::move(u));
}

std::vector<double> occupancy_pmf(const TailVector& u) {
  std::vector<double> p(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) p[k] = u.entry(k) - u.entry(k + 1);
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  return p;
}

double rho_distance(const TailVector& a, const TailVector& b) {
  // Terms past the common support are 0/k; the sup is attained within it.
  std::size_t kmax = std::max(a.size(), b.size());
  double sup = 0.0;
  for (std::size_t k = 1; k < kmax; ++k)
    sup = std::max(sup, std::abs(a.entry(k) - b.entry(k)) / static_cast<double>(k));
  return sup;
}

double mean_occupancy(const TailVector& u) {
  // Smallest terms first keeps the rounding error of long geometric-like
  // tails at a few ulps.
  double sum = 0.0;
  for (std::size_t k = u.size(); k-- > 1;) sum += u.entry(k);
  return sum;
}

}  // namespace oslab
