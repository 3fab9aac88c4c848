#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace oslab {

// Nonincreasing occupancy tail: entry k is the fraction of queues holding at
// least k packets.  entry(0) == 1 exactly; entries past size() are implicitly
// zero.  Immutable after construction.
class TailVector {
 public:
  // The all-empty tail (1).
  TailVector() : entries_{1.0} {}

  // Validates entries: entries[0] must be exactly 1; entries must be
  // nonincreasing and in [0,1].  Violations up to mono_tol (from numerical
  // integration) are snapped back onto the valid set; larger ones throw
  // std::invalid_argument.
  static TailVector from_entries(std::vector<double> entries, double mono_tol = 0.0);

  double entry(std::size_t k) const { return k < entries_.size() ? entries_[k] : 0.0; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<double>& entries() const { return entries_; }

  bool operator==(const TailVector& other) const = default;

 private:
  struct Unchecked {};
  TailVector(std::vector<double> e, Unchecked) : entries_(std::move(e)) {}

  std::vector<double> entries_;

  friend TailVector tail_unchecked(std::vector<double> e);
};

// Construction bypass for producers that guarantee validity themselves
// (count conversion, the integrators after their own repair step).
TailVector tail_unchecked(std::vector<double> e);

// Integer occupancy counts: m[k] queues hold >= k packets, m[0] == n.
struct CountTail {
  std::vector<int64_t> m;
  double time = 0.0;
};

// u_k = m_k / n.  Throws if c is inconsistent with system size n.
TailVector tail_from_counts(const CountTail& c, int64_t n);

// p_k = u_k - u_{k+1} with u_{K+1} = 0; trailing zeros trimmed.
// Sums to 1 by telescoping.
std::vector<double> occupancy_pmf(const TailVector& u);

// sup_{k>=1} |u_k - u'_k| / k over the union of supports.
double rho_distance(const TailVector& a, const TailVector& b);

// Sum_{k>=1} u_k, the average queue occupancy the tail represents.
double mean_occupancy(const TailVector& u);

}  // namespace oslab
